"""
Sparse matrix realisation of the lattice operators.

Matrices act on interior coefficient vectors ordered by degree, then
direction set (lexicographic), then site (k0 slowest). Every operator is
assembled from one-dimensional shift stencils combined with Kronecker
products; zero-padded domains simply drop the wrap-around entries, which is
the ghost-zero convention of the direct operators.
"""
from dataclasses import dataclass
from functools import cached_property, lru_cache
import logging
import re

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from django.core.exceptions import ValidationError

from cochains.calculus import METRIC, STAR_SIGNS, time_sign
from cochains.forms import Form, InhomogeneousForm
from cochains.lattice import AXES, DIRECTION_SETS, complement, component_index, position

logger = logging.getLogger(__name__)

OPERATOR_COBOUNDARY = 'coboundary'
OPERATOR_CODIFFERENTIAL = 'codifferential'
OPERATOR_STAR = 'star'
OPERATOR_LAPLACIAN = 'laplacian'
OPERATOR_DIRAC_PLUS = 'dirac+'
OPERATOR_DIRAC_MINUS = 'dirac-'
OPERATOR_DK = 'dk'
OPERATOR_TWO_MASS = 'two_mass'
OPERATOR_DUFFIN = 'duffin'

OPERATOR_CHOICES = [
    (OPERATOR_COBOUNDARY, 'Coboundary d_r'),
    (OPERATOR_CODIFFERENTIAL, 'Codifferential delta_r'),
    (OPERATOR_STAR, 'Hodge star *_r'),
    (OPERATOR_LAPLACIAN, 'Laplacian (per degree or inhomogeneous)'),
    (OPERATOR_DIRAC_PLUS, 'Dirac operator d + delta'),
    (OPERATOR_DIRAC_MINUS, 'Dirac operator d - delta'),
    (OPERATOR_DK, 'Dirac-Kahler operator D_- - m'),
    (OPERATOR_TWO_MASS, 'Two-mass operator'),
    (OPERATOR_DUFFIN, 'Duffin pair operator of degree r'),
]
DEGREE_OPERATORS = {OPERATOR_COBOUNDARY, OPERATOR_CODIFFERENTIAL, OPERATOR_STAR, OPERATOR_DUFFIN}

_TAG_PATTERN = re.compile(r'^(?P<name>[a-z_]+[+-]?)(?:_(?P<degree>[0-4]))?$')


@dataclass(frozen=True)
class BasisIndex:
    """Bijection between vector positions and (degree, dirs, site) labels."""

    domain: object
    degrees: tuple

    @cached_property
    def sites(self):
        return self.domain.enumerate_sites()

    def block_size(self, degree):
        return len(DIRECTION_SETS[degree]) * self.domain.site_count

    def offset(self, degree):
        if degree not in self.degrees:
            raise ValidationError(f'Degree {degree} is not part of this basis.')
        return sum(self.block_size(r) for r in self.degrees[:self.degrees.index(degree)])

    @property
    def size(self):
        return sum(self.block_size(r) for r in self.degrees)

    def column(self, degree, dirs, k):
        site = self.domain.storage_index(k)
        pad = self.domain.padding
        flat = int(np.ravel_multi_index(tuple(i - pad for i in site), self.domain.extents))
        return self.offset(degree) + component_index(dirs) * self.domain.site_count + flat

    def label(self, column):
        for degree in self.degrees:
            size = self.block_size(degree)
            if column < size:
                component, flat = divmod(column, self.domain.site_count)
                return degree, DIRECTION_SETS[degree][component], self.sites[flat]
            column -= size
        raise IndexError(f'Column {column} is outside the basis.')

    def labels(self):
        for degree in self.degrees:
            for dirs in DIRECTION_SETS[degree]:
                for k in self.sites:
                    yield degree, dirs, k

    def to_records(self):
        return [
            {'index': n, 'degree': degree, 'dirs': list(dirs), 'k': list(k)}
            for n, (degree, dirs, k) in enumerate(self.labels())
        ]

    def vector(self, *forms):
        """Stack the interior coefficients of forms of this basis' degrees."""
        if tuple(f.degree for f in forms) != self.degrees:
            raise ValidationError(f'Expected forms of degrees {self.degrees}.')
        return np.concatenate([f.vector() for f in forms])

    def split(self, vector):
        """Forms encoded in a coefficient vector, in degree order."""
        forms, offset = [], 0
        for degree in self.degrees:
            size = self.block_size(degree)
            forms.append(Form.from_vector(degree, self.domain, vector[offset:offset + size]))
            offset += size
        return forms


INHOMOGENEOUS = (0, 1, 2, 3, 4)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    matrix: object
    rows: BasisIndex
    cols: BasisIndex
    tag: str

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def is_complex(self):
        return np.iscomplexobj(self.matrix.data)

    def entries(self):
        """(row, col, value) triples sorted by column, then row."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.row, coo.col))
        return [(int(coo.row[n]), int(coo.col[n]), coo.data[n].item()) for n in order]

    def apply(self, vector):
        return self.matrix @ vector

    def apply_forms(self, *forms):
        return self.rows.split(self.apply(self.cols.vector(*forms)))

    def frobenius_norm(self):
        return float(spla.norm(self.matrix)) if self.matrix.nnz else 0.0

    def to_dense(self):
        return self.matrix.toarray()

    def __str__(self):
        return f'{self.tag} {self.shape[0]}x{self.shape[1]} nnz={self.matrix.nnz}'


def _shift_1d(n, periodic):
    rows = list(range(n - 1))
    cols = list(range(1, n))
    if periodic:
        rows.append(n - 1)
        cols.append(0)
    return sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n)).tocsr()


@lru_cache(maxsize=32)
def _forward_shifts(domain):
    """T_a with (T_a x)_k = x_{tau_a k} on interior sites, one per axis."""
    shifts = []
    for axis in AXES:
        factors = [
            _shift_1d(n, domain.is_periodic) if a == axis else sp.identity(n, format='csr')
            for a, n in enumerate(domain.extents)
        ]
        matrix = factors[0]
        for factor in factors[1:]:
            matrix = sp.kron(matrix, factor, format='csr')
        shifts.append(matrix)
    return tuple(shifts)


def _identity(domain):
    return sp.identity(domain.site_count, format='csr')


def _forward_difference(domain, axis):
    return _forward_shifts(domain)[axis] - _identity(domain)


def _backward_difference(domain, axis):
    return _identity(domain) - _forward_shifts(domain)[axis].T


def _blocks(row_degree, col_degree):
    return [[None] * len(DIRECTION_SETS[col_degree]) for _ in DIRECTION_SETS[row_degree]]


def _bmat(blocks, domain):
    """bmat that tolerates block rows or columns with no entries."""
    n = domain.site_count
    empty = sp.csr_matrix((n, n))
    filled = [[block if block is not None else empty for block in row] for row in blocks]
    return sp.bmat(filled, format='csr')


def coboundary_matrix(domain, degree):
    blocks = _blocks(degree + 1, degree)
    for c, dirs in enumerate(DIRECTION_SETS[degree]):
        for i in complement(dirs):
            target = component_index(tuple(sorted(dirs + (i,))))
            sign = -1 if position(i, dirs) % 2 else 1
            blocks[target][c] = sign * _forward_difference(domain, i)
    return _bmat(blocks, domain)


def codifferential_matrix(domain, degree):
    blocks = _blocks(degree - 1, degree)
    for c, dirs in enumerate(DIRECTION_SETS[degree - 1]):
        for i in complement(dirs):
            source = component_index(tuple(sorted(dirs + (i,))))
            sign = -1 if position(i, dirs) % 2 else 1
            blocks[c][source] = sign * METRIC[i] * _backward_difference(domain, i)
    return _bmat(blocks, domain)


def star_matrix(domain, degree):
    blocks = _blocks(4 - degree, degree)
    shifts = _forward_shifts(domain)
    for c, dirs in enumerate(DIRECTION_SETS[degree]):
        block = _identity(domain)
        for a in dirs:
            block = shifts[a].T @ block
        blocks[component_index(complement(dirs))][c] = STAR_SIGNS[dirs] * block
    return _bmat(blocks, domain)


def laplacian_matrix(domain, degree):
    size = len(DIRECTION_SETS[degree]) * domain.site_count
    out = sp.csr_matrix((size, size))
    if degree > 0:
        out = out + coboundary_matrix(domain, degree - 1) @ codifferential_matrix(domain, degree)
    if degree < 4:
        out = out + codifferential_matrix(domain, degree + 1) @ coboundary_matrix(domain, degree)
    return (-out).tocsr()


def _inhomogeneous(domain, sign):
    blocks = [[None] * 5 for _ in range(5)]
    for r in range(5):
        size_r = len(DIRECTION_SETS[r]) * domain.site_count
        blocks[r][r] = sp.csr_matrix((size_r, size_r))
        if r > 0:
            blocks[r][r - 1] = coboundary_matrix(domain, r - 1)
        if r < 4:
            blocks[r][r + 1] = sign * codifferential_matrix(domain, r + 1)
    return sp.bmat(blocks, format='csr')


def _mass_diagonal(domain, masses):
    return sp.block_diag(
        [mass * sp.identity(len(DIRECTION_SETS[r]) * domain.site_count) for r, mass in enumerate(masses)],
        format='csr',
    )


def duffin_matrix(domain, degree, mass):
    """Residual map (low, high) -> (-delta high - m low, d low - m high)."""
    low = len(DIRECTION_SETS[degree]) * domain.site_count
    high = len(DIRECTION_SETS[degree + 1]) * domain.site_count
    return sp.bmat([
        [-mass * sp.identity(low), -codifferential_matrix(domain, degree + 1)],
        [coboundary_matrix(domain, degree), -mass * sp.identity(high)],
    ], format='csr')


def parse_tag(tag):
    """Split 'coboundary_1' into ('coboundary', 1); 'dirac-' into ('dirac-', None)."""
    match = _TAG_PATTERN.match(tag)
    if not match or match['name'] not in dict(OPERATOR_CHOICES):
        raise ValidationError(f'Unknown operator tag "{tag}".')
    degree = int(match['degree']) if match['degree'] is not None else None
    return match['name'], degree


def assemble(tag, domain, degree=None, mass=None, mass2=None):
    """
    Assemble an operator as an OperatorMatrix.

    ``tag`` may carry the degree as a suffix ('coboundary_1'). Mass-dependent
    operators take ``mass`` (and ``mass2`` for the two-mass system).
    """
    name, suffix = parse_tag(tag)
    degree = suffix if suffix is not None else degree
    if name in DEGREE_OPERATORS and degree is None:
        raise ValidationError(f'Operator "{name}" needs a degree.')

    if name == OPERATOR_COBOUNDARY:
        if degree == 4:
            raise ValidationError('The coboundary of a 4-form has no target degree.')
        matrix, rows, cols = coboundary_matrix(domain, degree), (degree + 1,), (degree,)
    elif name == OPERATOR_CODIFFERENTIAL:
        if degree == 0:
            raise ValidationError('The codifferential needs a degree of at least 1.')
        matrix, rows, cols = codifferential_matrix(domain, degree), (degree - 1,), (degree,)
    elif name == OPERATOR_STAR:
        matrix, rows, cols = star_matrix(domain, degree), (4 - degree,), (degree,)
    elif name == OPERATOR_LAPLACIAN and degree is not None:
        matrix, rows, cols = laplacian_matrix(domain, degree), (degree,), (degree,)
    elif name == OPERATOR_LAPLACIAN:
        matrix = sp.block_diag([laplacian_matrix(domain, r) for r in range(5)], format='csr')
        rows = cols = INHOMOGENEOUS
    elif name in (OPERATOR_DIRAC_PLUS, OPERATOR_DIRAC_MINUS):
        matrix = _inhomogeneous(domain, 1 if name == OPERATOR_DIRAC_PLUS else -1)
        rows = cols = INHOMOGENEOUS
    elif name == OPERATOR_DK:
        mass = _require_mass(name, mass)
        matrix = (_inhomogeneous(domain, -1) - _mass_diagonal(domain, [mass] * 5)).tocsr()
        rows = cols = INHOMOGENEOUS
    elif name == OPERATOR_TWO_MASS:
        m1, m2 = _require_mass(name, mass), _require_mass(name, mass2)
        matrix = (_inhomogeneous(domain, -1) - _mass_diagonal(domain, [m1, m2, m1, m2, m1])).tocsr()
        rows = cols = INHOMOGENEOUS
    else:
        if degree == 4:
            raise ValidationError('Duffin pairs have a low degree of 0..3.')
        matrix = duffin_matrix(domain, degree, _require_mass(name, mass))
        rows = cols = (degree, degree + 1)

    full_tag = tag if suffix is not None or degree is None else f'{name}_{degree}'
    op = OperatorMatrix(matrix.tocsr(), BasisIndex(domain, rows), BasisIndex(domain, cols), full_tag)
    logger.debug(f'Assembled {op} on {domain}')
    return op


def _require_mass(name, mass):
    if mass is None:
        raise ValidationError(f'Operator "{name}" needs a mass parameter.')
    return mass


def gram_matrix(domain, degree=None):
    """Diagonal signature matrix realising the inner product on coefficient vectors."""
    degrees = INHOMOGENEOUS if degree is None else (degree,)
    diagonal = np.concatenate([
        np.repeat([time_sign(dirs) for dirs in DIRECTION_SETS[r]], domain.site_count)
        for r in degrees
    ]).astype(float)
    basis = BasisIndex(domain, degrees)
    tag = 'gram' if degree is None else f'gram_{degree}'
    return OperatorMatrix(sp.diags(diagonal, format='csr'), basis, basis, tag)


@lru_cache(maxsize=64)
def operator_norm_bound(tag, domain):
    """Frobenius norm of an assembled operator; an upper bound on its 2-norm."""
    return assemble(tag, domain).frobenius_norm()


def field_vector(field):
    """Coefficient vector of an InhomogeneousForm in the inhomogeneous basis."""
    return BasisIndex(field.domain, INHOMOGENEOUS).vector(*field.parts)


def field_from_vector(domain, vector):
    return InhomogeneousForm(BasisIndex(domain, INHOMOGENEOUS).split(vector))
