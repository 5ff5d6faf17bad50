"""
The discrete Dirac-Kahler equation and its Duffin decomposition.

A field W solves the equation when (d - delta) W = m W. The same system is
available as sixteen scalar difference equations, one per component family,
each coded directly from forward (D+) and backward (D-) differences.
"""
from dataclasses import dataclass
import logging

import numpy as np
import scipy.sparse as sp
from django.conf import settings
from django.core.exceptions import ValidationError

from cochains.calculus import DIRAC_MINUS, apply_partwise, coboundary, codifferential, dirac, laplacian
from cochains.forms import Form, InhomogeneousForm, norm
from cochains.lattice import ALL_DIRECTION_SETS, BACKWARD, FORWARD
from cochains.reports import Report
from spectra.assembly import (
    BasisIndex, OperatorMatrix, assemble, duffin_matrix, field_from_vector, operator_norm_bound,
)
from spectra.linalg import eigenpairs, kernel

logger = logging.getLogger(__name__)

# target direction set -> (sign, axis, difference, source direction set) terms
EQUATIONS = (
    ((), ((-1, 0, BACKWARD, (0,)), (1, 1, BACKWARD, (1,)), (1, 2, BACKWARD, (2,)), (1, 3, BACKWARD, (3,)))),
    ((0,), ((1, 0, FORWARD, ()), (-1, 1, BACKWARD, (0, 1)), (-1, 2, BACKWARD, (0, 2)), (-1, 3, BACKWARD, (0, 3)))),
    ((1,), ((1, 1, FORWARD, ()), (-1, 0, BACKWARD, (0, 1)), (-1, 2, BACKWARD, (1, 2)), (-1, 3, BACKWARD, (1, 3)))),
    ((2,), ((1, 2, FORWARD, ()), (-1, 0, BACKWARD, (0, 2)), (1, 1, BACKWARD, (1, 2)), (-1, 3, BACKWARD, (2, 3)))),
    ((3,), ((1, 3, FORWARD, ()), (-1, 0, BACKWARD, (0, 3)), (1, 1, BACKWARD, (1, 3)), (1, 2, BACKWARD, (2, 3)))),
    ((0, 1), ((1, 0, FORWARD, (1,)), (-1, 1, FORWARD, (0,)), (1, 2, BACKWARD, (0, 1, 2)), (1, 3, BACKWARD, (0, 1, 3)))),
    ((0, 2), ((1, 0, FORWARD, (2,)), (-1, 2, FORWARD, (0,)), (-1, 1, BACKWARD, (0, 1, 2)), (1, 3, BACKWARD, (0, 2, 3)))),
    ((0, 3), ((1, 0, FORWARD, (3,)), (-1, 3, FORWARD, (0,)), (-1, 1, BACKWARD, (0, 1, 3)), (-1, 2, BACKWARD, (0, 2, 3)))),
    ((1, 2), ((1, 1, FORWARD, (2,)), (-1, 2, FORWARD, (1,)), (-1, 0, BACKWARD, (0, 1, 2)), (1, 3, BACKWARD, (1, 2, 3)))),
    ((1, 3), ((1, 1, FORWARD, (3,)), (-1, 3, FORWARD, (1,)), (-1, 0, BACKWARD, (0, 1, 3)), (-1, 2, BACKWARD, (1, 2, 3)))),
    ((2, 3), ((1, 2, FORWARD, (3,)), (-1, 3, FORWARD, (2,)), (-1, 0, BACKWARD, (0, 2, 3)), (1, 1, BACKWARD, (1, 2, 3)))),
    ((0, 1, 2), ((1, 0, FORWARD, (1, 2)), (-1, 1, FORWARD, (0, 2)), (1, 2, FORWARD, (0, 1)), (-1, 3, BACKWARD, (0, 1, 2, 3)))),
    ((0, 1, 3), ((1, 0, FORWARD, (1, 3)), (-1, 1, FORWARD, (0, 3)), (1, 3, FORWARD, (0, 1)), (1, 2, BACKWARD, (0, 1, 2, 3)))),
    ((0, 2, 3), ((1, 0, FORWARD, (2, 3)), (-1, 2, FORWARD, (0, 3)), (1, 3, FORWARD, (0, 2)), (-1, 1, BACKWARD, (0, 1, 2, 3)))),
    ((1, 2, 3), ((1, 1, FORWARD, (2, 3)), (-1, 2, FORWARD, (1, 3)), (1, 3, FORWARD, (1, 2)), (-1, 0, BACKWARD, (0, 1, 2, 3)))),
    ((0, 1, 2, 3), ((1, 0, FORWARD, (1, 2, 3)), (-1, 1, FORWARD, (0, 2, 3)), (1, 2, FORWARD, (0, 1, 3)), (-1, 3, FORWARD, (0, 1, 2)))),
)


def dk_residual(field, mass):
    """D_- W - m W; zero iff W solves the Dirac-Kahler equation."""
    return dirac(field, DIRAC_MINUS) - mass * field


def _difference(domain, plane, axis, kind):
    if kind == FORWARD:
        return domain.translate(plane, axis, 1) - plane
    return plane - domain.translate(plane, axis, -1)


def dk_residual_components(field, mass):
    """
    Evaluate the sixteen difference equations one by one.

    Returns a dict mapping each target direction set (in canonical order) to
    its residual plane over the storage grid.
    """
    domain = field.domain
    planes = {}
    for target, terms in EQUATIONS:
        total = 0
        for sign, axis, kind, source in terms:
            plane = field.part(len(source)).component(source)
            total = total + sign * _difference(domain, plane, axis, kind)
        own = field.part(len(target)).component(target)
        planes[target] = domain.clear_ghosts(total) - mass * own
    return planes


def components_to_form(planes, domain):
    """Pack sixteen component planes back into an InhomogeneousForm."""
    if set(planes) != set(ALL_DIRECTION_SETS):
        raise ValidationError('Expected one plane per direction set.')
    parts = []
    for r in range(5):
        stacked = np.stack([planes[dirs] for dirs in ALL_DIRECTION_SETS if len(dirs) == r])
        parts.append(Form(r, domain, stacked))
    return InhomogeneousForm(parts)


def klein_gordon_residual(form, msq):
    """Laplacian minus msq times the input, partwise for inhomogeneous forms."""
    if isinstance(form, InhomogeneousForm):
        return apply_partwise(lambda part: klein_gordon_residual(part, msq), form)
    return laplacian(form) - msq * form


@dataclass(frozen=True, eq=False)
class DuffinPair:
    """Two forms of consecutive degree r and r + 1."""

    low: Form
    high: Form

    def __post_init__(self):
        if self.high.degree != self.low.degree + 1:
            raise ValidationError(
                f'A Duffin pair needs consecutive degrees, got {self.low.degree} and {self.high.degree}.'
            )
        if self.low.domain != self.high.domain:
            raise ValidationError('Both forms of a Duffin pair must share one domain.')

    @property
    def degree(self):
        return self.low.degree

    @property
    def domain(self):
        return self.low.domain

    @property
    def label(self):
        return f'{self.degree}{self.degree + 1}'

    def as_field(self):
        return InhomogeneousForm.from_parts(
            self.domain, {self.degree: self.low, self.degree + 1: self.high}, scalar=self.low.scalar,
        )

    def norm(self):
        return float(np.hypot(norm(self.low), norm(self.high)))


def duffin_residual(pair, mass):
    """(-delta high - m low, d low - m high)."""
    return DuffinPair(
        low=-codifferential(pair.high) - mass * pair.low,
        high=coboundary(pair.low) - mass * pair.high,
    )


def _require_nonzero(mass):
    if mass == 0:
        raise ValidationError('The Duffin decomposition needs a nonzero mass (division by mass).')


def duffin_decompose(field, mass):
    """
    Split W into four Duffin pairs of degrees (0,1), (1,2), (2,3) and (3,4).

    Each middle part w_r is cut into w_r + (1/m) delta w_{r+1}, which goes to
    the pair below, and -(1/m) delta w_{r+1}, which goes to the pair above.
    """
    _require_nonzero(mass)
    tails = {r: codifferential(field.part(r + 1)) * (1 / mass) for r in (1, 2, 3)}
    first = {r: field.part(r) + tails[r] for r in (1, 2, 3)}
    second = {r: -tails[r] for r in (1, 2, 3)}
    pairs = [
        DuffinPair(field.part(0), first[1]),
        DuffinPair(second[1], first[2]),
        DuffinPair(second[2], first[3]),
        DuffinPair(second[3], field.part(4)),
    ]
    logger.debug(f'Decomposed {field} with m={mass} into {len(pairs)} Duffin pairs')
    return pairs


def recompose(pairs):
    pairs = list(pairs)
    total = pairs[0].as_field()
    for pair in pairs[1:]:
        total = total + pair.as_field()
    return total


@dataclass(frozen=True, eq=False)
class PropagationIdentity:
    """
    Klein-Gordon residuals of a pair next to what its Duffin residuals predict.

    With e_low = -delta b - m a and e_high = d a - m b:
    KG(a) = (1/m) d delta e_low + m e_low - delta e_high and
    KG(b) = d e_low + m e_high + (1/m) delta d e_high.
    """

    residual: DuffinPair
    klein_gordon: DuffinPair
    predicted: DuffinPair

    def gap(self):
        return max(
            norm(self.klein_gordon.low - self.predicted.low),
            norm(self.klein_gordon.high - self.predicted.high),
        )


def kg_propagation_identity(pair, mass):
    _require_nonzero(mass)
    residual = duffin_residual(pair, mass)
    e_low, e_high = residual.low, residual.high

    predicted_low = mass * e_low - codifferential(e_high)
    if pair.degree > 0:
        predicted_low = predicted_low + coboundary(codifferential(e_low)) * (1 / mass)
    predicted_high = coboundary(e_low) + mass * e_high
    if pair.high.degree < 4:
        predicted_high = predicted_high + codifferential(coboundary(e_high)) * (1 / mass)

    msq = mass * mass
    return PropagationIdentity(
        residual=residual,
        klein_gordon=DuffinPair(klein_gordon_residual(pair.low, msq), klein_gordon_residual(pair.high, msq)),
        predicted=DuffinPair(predicted_low, predicted_high),
    )


@dataclass(frozen=True)
class KleinGordonBound:
    """Bounds on the Klein-Gordon residuals of a pair in terms of its Duffin residuals."""

    epsilon_low: float
    epsilon_high: float
    klein_gordon_low: float
    klein_gordon_high: float
    bound_low: float
    bound_high: float
    identity_gap: float


def kg_bound(pair, mass):
    """Evaluate the propagated bounds with Frobenius norms of the assembled operators."""
    identity = kg_propagation_identity(pair, mass)
    domain, r = pair.domain, pair.degree
    eps_low, eps_high = norm(identity.residual.low), norm(identity.residual.high)
    abs_mass = abs(mass)

    delta_high = operator_norm_bound(f'codifferential_{r + 1}', domain)
    d_low = operator_norm_bound(f'coboundary_{r}', domain)
    d_delta = operator_norm_bound(f'coboundary_{r - 1}', domain) * operator_norm_bound(f'codifferential_{r}', domain) if r > 0 else 0.0
    delta_d = operator_norm_bound(f'codifferential_{r + 2}', domain) * operator_norm_bound(f'coboundary_{r + 1}', domain) if r < 3 else 0.0

    return KleinGordonBound(
        epsilon_low=eps_low,
        epsilon_high=eps_high,
        klein_gordon_low=norm(identity.klein_gordon.low),
        klein_gordon_high=norm(identity.klein_gordon.high),
        bound_low=(d_delta / abs_mass + abs_mass) * eps_low + delta_high * eps_high,
        bound_high=d_low * eps_low + (abs_mass + delta_d / abs_mass) * eps_high,
        identity_gap=identity.gap(),
    )


def _identity_scale(pair, mass):
    """Size of the terms whose cancellation the propagation identity relies on."""
    domain, r = pair.domain, pair.degree
    laplacians = operator_norm_bound(f'laplacian_{r}', domain) + operator_norm_bound(f'laplacian_{r + 1}', domain)
    return max(abs(mass) ** 2 + laplacians, 1.0)


def duffin_implies_kg_check(pair, mass, tol=None, report=None):
    """
    Check that small Duffin residuals force small Klein-Gordon residuals.

    Records the exact propagation identity and the resulting bounds for both
    forms of the pair.
    """
    tol = tol if tol is not None else settings.TOL_EIGEN
    report = report or Report('duffin_kg', tolerance=tol)
    bounds = kg_bound(pair, mass)
    scale = max(pair.norm(), 1.0)
    slack = tol * scale
    name = f'pair_{pair.label}'

    report.record(
        f'{name}_propagation_identity', bounds.identity_gap,
        settings.TOL_IDENTITY * scale * _identity_scale(pair, mass),
        note='KG residual equals the propagated Duffin residuals',
    )
    report.record(
        f'{name}_kg_low', bounds.klein_gordon_low, bounds.bound_low + slack,
        norm_before=bounds.epsilon_low, norm_after=bounds.klein_gordon_low,
    )
    report.record(
        f'{name}_kg_high', bounds.klein_gordon_high, bounds.bound_high + slack,
        norm_before=bounds.epsilon_high, norm_after=bounds.klein_gordon_high,
    )
    return report


def duffin_uniqueness_defect(domain, mass, tol=None):
    """
    Dimension of the space of Duffin-pair quadruples that sum to zero.

    Two decompositions of the same field differ by pairs (0, x1), (-x1, x2),
    (-x2, x3), (-x3, 0); each must solve the Duffin system. A zero result
    means the decomposition is unique on this lattice.

    For any m != 0 the result is always 0: the pair (0, x1) gives m x1 = 0,
    and the rest follow in turn. Treat it as a consistency check on the
    assembled Duffin blocks, not as evidence about the lattice.
    """
    _require_nonzero(mass)
    blocks = []
    sizes = {r: BasisIndex(domain, (r,)).size for r in range(5)}
    for r in range(4):
        matrix = duffin_matrix(domain, r, mass)
        low, high = matrix[:, :sizes[r]], matrix[:, sizes[r]:]
        row = [None, None, None]
        if r > 0:
            row[r - 1] = -low
        if r < 3:
            row[r] = high
        blocks.append(row)
    stacked = sp.bmat(blocks, format='csr')
    op = OperatorMatrix(stacked, None, BasisIndex(domain, (1, 2, 3)), 'duffin_defect')
    dimension = len(kernel(op, tol=tol))
    logger.info(f'Duffin decomposition defect on {domain} with m={mass}: {dimension}')
    return dimension


def eigen_solutions(domain, count=5, tol=None):
    """
    Nontrivial solutions as (mass, field) pairs.

    Each field is an eigenvector of the assembled D_- with a nonzero
    eigenvalue, which is then used as the mass.
    """
    pairs = eigenpairs(assemble('dirac-', domain), count=count, tol=tol, nonzero=True)
    if len(pairs) < count:
        logger.warning(f'Only {len(pairs)} of {count} eigen-solutions passed the residual bound on {domain}')
    return [(pair.value, field_from_vector(domain, pair.vector)) for pair in pairs]
