"""
Gauge transformations, the two-mass system and its massless limits.

Invariance is always checked in two layers: the exact identity that says by
how much a residual moves (a Laplacian of the gauge form), and the
approximate invariance that follows when the gauge form is harmonic. When a
gauge form is not harmonic within tolerance the invariance check is reported
as a diagnostic instead of a failure.
"""
from dataclasses import dataclass
import logging

import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError
from numpy.lib import scimath

from cochains.calculus import DIRAC_MINUS, apply_partwise, coboundary, codifferential, dirac, laplacian
from cochains.forms import SCALAR_INTEGER, Form, InhomogeneousForm, norm
from cochains.reports import Report
from spectra.assembly import assemble, field_from_vector, operator_norm_bound
from spectra.linalg import kernel

from .equations import dk_residual

logger = logging.getLogger(__name__)

GAUGE_D = 'd'
GAUGE_DELTA = 'delta'
GAUGE_FULL = 'full'
GAUGE_KINDS = [
    (GAUGE_D, 'W + d Phi'),
    (GAUGE_DELTA, 'W + delta Phi'),
    (GAUGE_FULL, 'W + d Phi - delta Phi'),
]


@dataclass(frozen=True)
class TwoMass:
    m1: complex
    m2: complex

    @property
    def combined(self):
        """sqrt(m1 m2), on the principal branch for negative or complex products."""
        return scimath.sqrt(self.m1 * self.m2)

    @property
    def masses(self):
        """Mass multiplying each degree: m1 on even parts, m2 on odd parts."""
        return (self.m1, self.m2, self.m1, self.m2, self.m1)

    @classmethod
    def from_eigenvalue(cls, value, ratio=2):
        """Split an eigenvalue of D_- into masses whose product is its square."""
        return cls(value / ratio, value * ratio)


def _check_domain(*fields):
    domain = fields[0].domain
    for field in fields[1:]:
        if field.domain != domain:
            raise ValidationError(f'Domain mismatch: {domain} vs {field.domain}.')
    return domain


def _d_of(field, r):
    """d of part r - 1 as a degree-r form (zero for r = 0)."""
    if r == 0:
        return Form.zeros(0, field.domain, scalar=field.scalar)
    return coboundary(field.part(r - 1))


def _delta_of(field, r):
    """delta of part r + 1 as a degree-r form (zero for r = 4)."""
    if r == 4:
        return Form.zeros(4, field.domain, scalar=field.scalar)
    return codifferential(field.part(r + 1))


def gauge_transform(field, phi, kind=GAUGE_FULL):
    _check_domain(field, phi)
    if kind not in dict(GAUGE_KINDS):
        raise ValidationError(f'Unknown gauge kind "{kind}".')
    parts = []
    for r in range(5):
        part = field.part(r)
        if kind in (GAUGE_D, GAUGE_FULL):
            part = part + _d_of(phi, r)
        if kind == GAUGE_DELTA:
            part = part + _delta_of(phi, r)
        elif kind == GAUGE_FULL:
            part = part - _delta_of(phi, r)
        parts.append(part)
    return InhomogeneousForm(parts)


def two_mass_residual(field, masses):
    """D_- W minus m1 on even degrees and m2 on odd degrees."""
    shifted = dirac(field, DIRAC_MINUS)
    return InhomogeneousForm(shifted.part(r) - mass * field.part(r) for r, mass in enumerate(masses.masses))


def electromagnetic_residual(field, m1):
    """The two-mass system with m2 = 0."""
    return InhomogeneousForm([
        -_delta_of(field, 0) - m1 * field.part(0),
        _d_of(field, 1) - _delta_of(field, 1),
        _d_of(field, 2) - _delta_of(field, 2) - m1 * field.part(2),
        _d_of(field, 3) - _delta_of(field, 3),
        _d_of(field, 4) - m1 * field.part(4),
    ])


def notoph_residual(field, m2):
    """The two-mass system with m1 = 0."""
    return InhomogeneousForm([
        -_delta_of(field, 0),
        _d_of(field, 1) - _delta_of(field, 1) - m2 * field.part(1),
        _d_of(field, 2) - _delta_of(field, 2),
        _d_of(field, 3) - _delta_of(field, 3) - m2 * field.part(3),
        _d_of(field, 4),
    ])


def inhomogeneous_norm(field):
    return float(np.linalg.norm(field.vector()))


def harmonic_basis(domain, degreewise=False, tol=None):
    """
    Numerical kernel of the Laplacian as a list of InhomogeneousForms.

    With ``degreewise`` every returned form lives in a single degree. Vectors
    that fail the re-check through the direct Laplacian are dropped.
    """
    tol = tol if tol is not None else settings.TOL_KERNEL
    if degreewise:
        candidates = []
        for r in range(5):
            for vector in kernel(assemble(f'laplacian_{r}', domain), tol=tol):
                form = Form.from_vector(r, domain, vector)
                candidates.append(InhomogeneousForm.from_parts(domain, {r: form}, scalar=form.scalar))
    else:
        candidates = [field_from_vector(domain, v) for v in kernel(assemble('laplacian', domain), tol=tol)]

    scale = max(operator_norm_bound('laplacian', domain), 1.0)
    basis = []
    for phi in candidates:
        defect = inhomogeneous_norm(apply_partwise(laplacian, phi))
        if defect <= tol * scale * inhomogeneous_norm(phi):
            basis.append(phi)
        else:
            logger.warning(f'Dropped a kernel vector with Laplacian defect {defect:.3e}')
    logger.info(f'Harmonic basis on {domain}: {len(basis)} forms')
    return basis


def two_mass_kernel(domain, masses, tol=None):
    """Kernel vectors of the assembled two-mass operator."""
    op = assemble('two_mass', domain, mass=masses.m1, mass2=masses.m2)
    return [field_from_vector(domain, v) for v in kernel(op, tol=tol)]


def _harmonic_defect(forms):
    """Norm of the Laplacian of the supplied gauge forms and the threshold it is judged by."""
    forms = [f for f in forms if f is not None]
    domain = forms[0].domain
    defect = float(np.sqrt(sum(norm(laplacian(f)) ** 2 for f in forms)))
    size = float(np.sqrt(sum(norm(f) ** 2 for f in forms)))
    return defect, size, max(operator_norm_bound('laplacian', domain), 1.0)


def _identity_bound(scale, *fields):
    """Roundoff allowance for identities evaluated in floating point."""
    size = sum(f.max_abs() for f in fields)
    return settings.TOL_IDENTITY * scale * max(size, 1.0)


def _is_exact(*fields):
    return all(f.scalar == SCALAR_INTEGER for f in fields)


def _record_identity(report, name, deviation, scale, *fields, note=''):
    exact = _is_exact(*fields)
    bound = 0.0 if exact else _identity_bound(scale, *fields)
    return report.record(name, deviation, bound, exact=exact, note=note)


def _record_invariance(report, name, change, defect, size, laplacian_scale, constant, tol, note=''):
    """
    Invariance of a residual under a gauge transformation.

    Passes when the change is within constant * tol * |Phi|; reported as a
    diagnostic when Phi itself is not harmonic within tolerance.
    """
    harmonic = defect <= tol * laplacian_scale * max(size, 1e-300)
    bound = constant * tol * laplacian_scale * size + settings.TOL_IDENTITY * constant * max(size, 1.0)
    if not harmonic:
        note = f'gauge form not harmonic (|Lap Phi| = {defect:.3e}); {note}'.strip('; ')
    return report.record(
        name, change, bound, diagnostic=not harmonic, note=note, norm_before=size, norm_after=change,
    )


def wave_invariance_check(field, phi, tol=None, report=None):
    """Lap(W + d Phi) against Lap W, and the commutation Lap d = d Lap."""
    domain = _check_domain(field, phi)
    tol = tol if tol is not None else settings.TOL_EIGEN
    report = report or Report('wave', tolerance=tol)
    constant = operator_norm_bound('dirac-', domain)

    moved = apply_partwise(laplacian, gauge_transform(field, phi, GAUGE_D))
    change = inhomogeneous_norm(moved - apply_partwise(laplacian, field))
    commutation = max(
        norm(laplacian(coboundary(phi.part(r))) - coboundary(laplacian(phi.part(r)))) for r in range(4)
    )
    _record_identity(report, 'commutation_lap_d', commutation, constant, field, phi)
    defect, size, scale = _harmonic_defect(phi.parts[:4])
    _record_invariance(report, 'wave_invariance_d', change, defect, size, scale, constant, tol)
    return report


def delta_invariance_check(field, phi, tol=None, report=None):
    """Lap(W + delta Phi) against Lap W, and the commutation Lap delta = delta Lap."""
    domain = _check_domain(field, phi)
    tol = tol if tol is not None else settings.TOL_EIGEN
    report = report or Report('wave_delta', tolerance=tol)
    constant = operator_norm_bound('dirac-', domain)

    moved = apply_partwise(laplacian, gauge_transform(field, phi, GAUGE_DELTA))
    change = inhomogeneous_norm(moved - apply_partwise(laplacian, field))
    commutation = max(
        norm(laplacian(codifferential(phi.part(r))) - codifferential(laplacian(phi.part(r)))) for r in range(1, 5)
    )
    _record_identity(report, 'commutation_lap_delta', commutation, constant, field, phi)
    defect, size, scale = _harmonic_defect(phi.parts[1:])
    _record_invariance(report, 'wave_invariance_delta', change, defect, size, scale, constant, tol)
    return report


def dirac_invariance_check(field, phi, tol=None, report=None):
    """
    Massless Dirac-Kahler residual under W -> W + d Phi - delta Phi.

    The residual moves by exactly Lap Phi.
    """
    domain = _check_domain(field, phi)
    tol = tol if tol is not None else settings.TOL_EIGEN
    report = report or Report('massless_dk', tolerance=tol)
    constant = operator_norm_bound('dirac-', domain)

    shift = dk_residual(gauge_transform(field, phi, GAUGE_FULL), 0) - dk_residual(field, 0)
    expected = apply_partwise(laplacian, phi)
    _record_identity(report, 'shift_law', inhomogeneous_norm(shift - expected), constant, field, phi)
    defect, size, scale = _harmonic_defect(phi.parts)
    _record_invariance(report, 'massless_invariance', inhomogeneous_norm(shift), defect, size, scale, constant, tol)
    return report


def _zero_if_none(form, degree, domain):
    return form if form is not None else Form.zeros(degree, domain, scalar=SCALAR_INTEGER)


def em_limit_gauge_check(field, phi0, phi4, m1, tol=None, report=None):
    """
    Electromagnetic limit under w1 -> w1 + d phi0, w3 -> w3 + delta phi4.

    The first residual moves by Lap phi0, the last by -Lap phi4 and the
    middle three do not move.
    """
    domain = field.domain
    phi0, phi4 = _zero_if_none(phi0, 0, domain), _zero_if_none(phi4, 4, domain)
    _check_domain(field, phi0, phi4)
    tol = tol if tol is not None else settings.TOL_EIGEN
    report = report or Report('electromagnetic', tolerance=tol)
    constant = operator_norm_bound('dirac-', domain)

    moved = field.replace(1, field.part(1) + coboundary(phi0)).replace(3, field.part(3) + codifferential(phi4))
    change = electromagnetic_residual(moved, m1) - electromagnetic_residual(field, m1)
    lap0, lap4 = laplacian(phi0), laplacian(phi4)

    _record_identity(report, 'identity_phi0', norm(-codifferential(coboundary(phi0)) - lap0), constant, phi0)
    _record_identity(report, 'identity_phi4', norm(coboundary(codifferential(phi4)) + lap4), constant, phi4)
    _record_identity(report, 'shift_phi0', norm(change.part(0) - lap0), constant, field, phi0)
    _record_identity(report, 'shift_phi4', norm(change.part(4) + lap4), constant, field, phi4)
    middle = max(norm(change.part(r)) for r in (1, 2, 3))
    _record_identity(report, 'unchanged_middle', middle, constant, field, phi0, phi4)

    defect, size, scale = _harmonic_defect([phi0, phi4])
    _record_invariance(report, 'em_invariance', inhomogeneous_norm(change), defect, size, scale, constant, tol)
    return report


def notoph_gauge_check(field, phi1, phi3, m2, tol=None, report=None):
    """
    Notoph limit under w0 -> w0 - delta phi1, w2 -> w2 + d phi1 - delta phi3,
    w4 -> w4 + d phi3.

    Residuals 1, 3 and 5 do not read the moved parts, so they are unchanged
    for any gauge forms; residuals 2 and 4 move by Lap phi1 and Lap phi3.
    """
    domain = field.domain
    phi1, phi3 = _zero_if_none(phi1, 1, domain), _zero_if_none(phi3, 3, domain)
    _check_domain(field, phi1, phi3)
    tol = tol if tol is not None else settings.TOL_EIGEN
    report = report or Report('notoph', tolerance=tol)
    constant = operator_norm_bound('dirac-', domain)

    moved = (
        field.replace(0, field.part(0) - codifferential(phi1))
        .replace(2, field.part(2) + coboundary(phi1) - codifferential(phi3))
        .replace(4, field.part(4) + coboundary(phi3))
    )
    change = notoph_residual(moved, m2) - notoph_residual(field, m2)

    structural = max(norm(change.part(r)) for r in (0, 2, 4))
    report.record('structural_unchanged', structural, 0.0, exact=True, note='residuals 1, 3 and 5')
    _record_identity(report, 'shift_phi1', norm(change.part(1) - laplacian(phi1)), constant, field, phi1)
    _record_identity(report, 'shift_phi3', norm(change.part(3) - laplacian(phi3)), constant, field, phi3)

    defect, size, scale = _harmonic_defect([phi1, phi3])
    _record_invariance(report, 'notoph_invariance', inhomogeneous_norm(change), defect, size, scale, constant, tol)
    return report


def kernel_klein_gordon_check(domain, masses, tol=None, report=None):
    """
    Kernel vectors of the two-mass operator satisfy Lap W = m1 m2 W.

    An empty kernel is a failure, not a vacuous pass.
    """
    tol = tol if tol is not None else settings.TOL_EIGEN
    report = report or Report('two_mass', tolerance=tol)
    vectors = two_mass_kernel(domain, masses)
    report.record('kernel_nonempty', 0 if vectors else 1, 0, exact=True, note=f'dimension {len(vectors)}')
    msq = masses.m1 * masses.m2
    scale = max(operator_norm_bound('laplacian', domain), abs(msq), 1.0)
    for n, field in enumerate(vectors):
        residual = apply_partwise(laplacian, field) - msq * field
        report.record(f'kernel_{n}_klein_gordon', inhomogeneous_norm(residual), tol * scale * inhomogeneous_norm(field))
    return report
