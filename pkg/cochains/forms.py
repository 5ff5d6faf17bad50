"""
Cochain storage.

A degree-r Form keeps C(4, r) dense component planes over the storage grid
of its domain, ordered as ``DIRECTION_SETS[r]``. An InhomogeneousForm is the
formal sum of five Forms of degrees 0..4 over one domain.
"""
import logging
from numbers import Number

import numpy as np
from django.core.exceptions import ValidationError

from .lattice import DIRECTION_SETS, component_index, direction_set

logger = logging.getLogger(__name__)

SCALAR_INTEGER = 'integer'
SCALAR_REAL = 'real'
SCALAR_COMPLEX = 'complex'
SCALAR_CHOICES = [
    (SCALAR_INTEGER, 'Exact integers'),
    (SCALAR_REAL, 'Real doubles'),
    (SCALAR_COMPLEX, 'Complex doubles'),
]
DTYPES = {
    SCALAR_INTEGER: np.int64,
    SCALAR_REAL: np.float64,
    SCALAR_COMPLEX: np.complex128,
}


def scalar_of(dtype):
    kind = np.dtype(dtype).kind
    if kind in 'iub':
        return SCALAR_INTEGER
    if kind == 'c':
        return SCALAR_COMPLEX
    return SCALAR_REAL


class Form:
    """Homogeneous cochain of a fixed degree."""

    # numpy scalars defer to __rmul__
    __array_ufunc__ = None

    def __init__(self, degree, domain, coeffs=None, scalar=SCALAR_REAL, top=False, truncated=False):
        if degree not in range(5):
            raise ValidationError(f'Degree must be 0..4, got {degree}.')
        shape = (len(DIRECTION_SETS[degree]),) + domain.storage_shape
        if coeffs is None:
            coeffs = np.zeros(shape, dtype=DTYPES[scalar])
        coeffs = np.asarray(coeffs)
        if coeffs.shape != shape:
            raise ValidationError(f'Degree {degree} coefficients need shape {shape}, got {coeffs.shape}.')
        self.degree = degree
        self.domain = domain
        self.coeffs = coeffs
        # top: result of d on a 4-form; truncated: support shifted out of storage
        self.top = top
        self.truncated = truncated

    @classmethod
    def zeros(cls, degree, domain, scalar=SCALAR_REAL, **flags):
        return cls(degree, domain, scalar=scalar, **flags)

    @classmethod
    def from_vector(cls, degree, domain, vector):
        """Inverse of :meth:`vector`: interior coefficients in basis order."""
        vector = np.asarray(vector)
        shape = (len(DIRECTION_SETS[degree]),) + domain.interior_shape
        form = cls.zeros(degree, domain, scalar=scalar_of(vector.dtype))
        form.coeffs[(slice(None),) + domain.interior] = vector.reshape(shape)
        return form

    @property
    def scalar(self):
        return scalar_of(self.coeffs.dtype)

    @property
    def components(self):
        return DIRECTION_SETS[self.degree]

    def component(self, dirs):
        return self.coeffs[component_index(direction_set(dirs))]

    def __getitem__(self, label):
        dirs, k = label
        if len(dirs) != self.degree:
            return 0
        if not self.domain.in_storage(k):
            return 0
        return self.component(dirs)[self.domain.storage_index(k)].item()

    def interior_values(self):
        return self.coeffs[(slice(None),) + self.domain.interior]

    def vector(self):
        return self.interior_values().reshape(-1)

    def support_ok(self):
        """True when every coefficient outside the interior is zero."""
        outside = ~self.domain.interior_mask()
        return not np.any(self.coeffs[:, outside])

    def is_zero(self):
        return not np.any(self.coeffs)

    def max_abs(self):
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def entries(self):
        """Nonzero (dirs, k, value) triples in component-then-site order."""
        for c, dirs in enumerate(self.components):
            plane = self.coeffs[c]
            for index in zip(*np.nonzero(plane)):
                yield dirs, self.domain.site_of(index), plane[index].item()

    def astype(self, scalar):
        return Form(self.degree, self.domain, self.coeffs.astype(DTYPES[scalar]),
                    top=self.top, truncated=self.truncated)

    def copy(self):
        return Form(self.degree, self.domain, self.coeffs.copy(), top=self.top, truncated=self.truncated)

    def _check_compatible(self, other):
        if not isinstance(other, Form):
            raise ValidationError(f'Cannot combine a Form with {type(other).__name__}.')
        if other.degree != self.degree:
            raise ValidationError(f'Degree mismatch: {self.degree} vs {other.degree}.')
        if other.domain != self.domain:
            raise ValidationError(f'Domain mismatch: {self.domain} vs {other.domain}.')

    def __add__(self, other):
        return linear_combine(1, self, 1, other)

    def __sub__(self, other):
        return linear_combine(1, self, -1, other)

    def __neg__(self):
        return Form(self.degree, self.domain, -self.coeffs, top=self.top, truncated=self.truncated)

    def __mul__(self, scalar):
        if not isinstance(scalar, Number):
            return NotImplemented
        return Form(self.degree, self.domain, scalar * self.coeffs, top=self.top, truncated=self.truncated)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return (
            self.degree == other.degree
            and self.domain == other.domain
            and np.array_equal(self.coeffs, other.coeffs)
        )

    __hash__ = None

    def __repr__(self):
        return f'<Form degree={self.degree} domain={self.domain} scalar={self.scalar} nnz={np.count_nonzero(self.coeffs)}>'


class InhomogeneousForm:
    """Sum of five Forms of degrees 0..4 sharing one domain."""

    __array_ufunc__ = None

    def __init__(self, parts):
        parts = tuple(parts)
        if len(parts) != 5:
            raise ValidationError(f'An inhomogeneous form has five parts, got {len(parts)}.')
        for r, part in enumerate(parts):
            if part.degree != r:
                raise ValidationError(f'Part {r} has degree {part.degree}.')
            if part.domain != parts[0].domain:
                raise ValidationError('All parts of an inhomogeneous form must share one domain.')
        self.parts = parts

    @classmethod
    def zeros(cls, domain, scalar=SCALAR_REAL):
        return cls(Form.zeros(r, domain, scalar=scalar) for r in range(5))

    @classmethod
    def from_parts(cls, domain, parts, scalar=SCALAR_REAL):
        """Build from a mapping degree -> Form; missing degrees are zero."""
        return cls(parts.get(r, Form.zeros(r, domain, scalar=scalar)) for r in range(5))

    @classmethod
    def from_vector(cls, domain, vector):
        vector = np.asarray(vector)
        parts, offset = [], 0
        for r in range(5):
            size = len(DIRECTION_SETS[r]) * domain.site_count
            parts.append(Form.from_vector(r, domain, vector[offset:offset + size]))
            offset += size
        return cls(parts)

    @property
    def domain(self):
        return self.parts[0].domain

    @property
    def scalar(self):
        return scalar_of(np.result_type(*(p.coeffs for p in self.parts)))

    def part(self, r):
        return self.parts[r]

    def replace(self, r, form):
        parts = list(self.parts)
        parts[r] = form
        return InhomogeneousForm(parts)

    def vector(self):
        return np.concatenate([p.vector() for p in self.parts])

    def is_zero(self):
        return all(p.is_zero() for p in self.parts)

    def max_abs(self):
        return max(p.max_abs() for p in self.parts)

    def support_ok(self):
        return all(p.support_ok() for p in self.parts)

    def _check_compatible(self, other):
        if not isinstance(other, InhomogeneousForm):
            raise ValidationError(f'Cannot combine an InhomogeneousForm with {type(other).__name__}.')

    def __add__(self, other):
        self._check_compatible(other)
        return InhomogeneousForm(a + b for a, b in zip(self.parts, other.parts))

    def __sub__(self, other):
        self._check_compatible(other)
        return InhomogeneousForm(a - b for a, b in zip(self.parts, other.parts))

    def __neg__(self):
        return InhomogeneousForm(-p for p in self.parts)

    def __mul__(self, scalar):
        if not isinstance(scalar, Number):
            return NotImplemented
        return InhomogeneousForm(scalar * p for p in self.parts)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, InhomogeneousForm):
            return NotImplemented
        return all(a == b for a, b in zip(self.parts, other.parts))

    __hash__ = None

    def __repr__(self):
        return f'<InhomogeneousForm domain={self.domain} scalar={self.scalar}>'


def basis_form(degree, dirs, k, domain, scalar=SCALAR_INTEGER):
    dirs = direction_set(dirs)
    if len(dirs) != degree:
        raise ValidationError(f'Direction set {dirs} does not label a degree {degree} cochain.')
    if not domain.contains(k):
        raise ValidationError(f'Site {tuple(k)} is not an interior site of {domain}.')
    form = Form.zeros(degree, domain, scalar=scalar)
    form.coeffs[(component_index(dirs),) + domain.storage_index(k)] = 1
    return form


def linear_combine(a, f, b, g):
    """Pointwise a*f + b*g."""
    f._check_compatible(g)
    return Form(f.degree, f.domain, a * f.coeffs + b * g.coeffs)


def random_coefficients(rng, shape, values):
    if values == SCALAR_INTEGER:
        return rng.integers(-3, 4, size=shape, dtype=np.int64)
    if values == SCALAR_COMPLEX:
        return rng.uniform(-1.0, 1.0, size=shape) + 1j * rng.uniform(-1.0, 1.0, size=shape)
    return rng.uniform(-1.0, 1.0, size=shape)


def random_form(degree, domain, seed, values=SCALAR_INTEGER, rng=None):
    """Seeded random interior-supported Form; integers are drawn from -3..3."""
    rng = rng if rng is not None else np.random.default_rng(seed)
    shape = (len(DIRECTION_SETS[degree]),) + domain.interior_shape
    form = Form.zeros(degree, domain, scalar=values)
    form.coeffs[(slice(None),) + domain.interior] = random_coefficients(rng, shape, values)
    return form


def random_inhomogeneous(domain, seed, values=SCALAR_INTEGER):
    rng = np.random.default_rng(seed)
    return InhomogeneousForm(random_form(r, domain, seed, values, rng=rng) for r in range(5))


def norm(form):
    """Euclidean norm of the interior coefficient vector."""
    return float(np.linalg.norm(form.vector()))
