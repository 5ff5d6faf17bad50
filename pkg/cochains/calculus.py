"""
Discrete exterior calculus on the Minkowski lattice.

Conventions
-----------
* Coboundary: (d w)^{J+i}_k += (-1)^pos(i,J) (w^J_{tau_i k} - w^J_k).
* Codifferential: the adjoint of d for the signature inner product,
  (delta w)^J_k = sum over i not in J of
  (-1)^pos(i,J) eta_i (w^{J+i}_k - w^{J+i}_{sigma_i k}),
  with eta = (+1, -1, -1, -1).
* Cup: (f u g)^{J1+J2}_k += s(J1, J2) f^{J1}_k g^{J2}_{tau_{J1} k} for
  disjoint J1, J2, where s counts the transpositions needed to sort J1 + J2.
* Star: *e_J^k = STAR_SIGNS[J] e_{J^c}^{tau_J k}.

In zero-padded mode d, delta and cup are evaluated on the padded grid and
restricted to the interior. The star keeps data that lands on the upper
ghost layer because the inner product reads it there.
"""
import logging
from math import prod

import numpy as np
from django.core.exceptions import ValidationError

from .forms import Form, InhomogeneousForm
from .lattice import AXES, DIRECTION_SETS, TIME_AXIS, complement, component_index, position

logger = logging.getLogger(__name__)

DIRAC_PLUS = '+'
DIRAC_MINUS = '-'
DIRAC_CHOICES = [
    (DIRAC_PLUS, 'd + delta'),
    (DIRAC_MINUS, 'd - delta'),
]

# Metric signs (+, -, -, -) per axis.
METRIC = {0: 1, 1: -1, 2: -1, 3: -1}

STAR_SIGNS = {
    (): 1,
    (0,): -1, (1,): -1, (2,): 1, (3,): -1,
    (0, 1): -1, (0, 2): 1, (0, 3): -1, (1, 2): 1, (1, 3): -1, (2, 3): 1,
    (0, 1, 2): -1, (0, 1, 3): 1, (0, 2, 3): -1, (1, 2, 3): -1,
    (0, 1, 2, 3): -1,
}


def cup_factor_sign(is_edge, q):
    """Sign picked up by one 1-D factor: -1 iff the factor is an edge and q is odd."""
    return -1 if is_edge and q % 2 else 1


def cup_sign(left, right):
    """
    Sign of e_left u e_right for disjoint direction sets.

    Accumulated factor by factor: each edge factor of the left element passes
    over the part of the right element that lies on earlier axes.
    """
    return prod(cup_factor_sign(a in left, position(a, right)) for a in AXES)


def time_sign(dirs):
    """+1 when the time factor is a vertex, -1 when it is an edge."""
    return -1 if TIME_AXIS in dirs else 1


def _scalar_zeros(degree, domain, *arrays):
    dtype = np.result_type(*arrays) if arrays else np.int64
    shape = (len(DIRECTION_SETS[degree]),) + domain.storage_shape
    return np.zeros(shape, dtype=dtype)


def _coboundary(form, keep_upper=False):
    domain = form.domain
    out = _scalar_zeros(form.degree + 1, domain, form.coeffs)
    for c, dirs in enumerate(form.components):
        plane = form.coeffs[c]
        for i in complement(dirs):
            target = component_index(tuple(sorted(dirs + (i,))))
            sign = -1 if position(i, dirs) % 2 else 1
            out[target] += sign * (domain.translate(plane, i, 1) - plane)
    return Form(form.degree + 1, domain, domain.clear_ghosts(out, keep_upper=keep_upper))


def coboundary(form):
    if form.degree == 4:
        logger.warning(f'Coboundary of a top degree form on {form.domain} is zero')
        return Form.zeros(4, form.domain, scalar=form.scalar, top=True)
    return _coboundary(form)


def codifferential(form):
    domain = form.domain
    if form.degree == 0:
        return Form.zeros(0, domain, scalar=form.scalar)
    degree = form.degree - 1
    out = _scalar_zeros(degree, domain, form.coeffs)
    for c, dirs in enumerate(DIRECTION_SETS[degree]):
        for i in complement(dirs):
            plane = form.component(tuple(sorted(dirs + (i,))))
            sign = -1 if position(i, dirs) % 2 else 1
            out[c] += sign * METRIC[i] * (plane - domain.translate(plane, i, -1))
    return Form(degree, domain, domain.clear_ghosts(out))


def cup(f, g):
    if f.domain != g.domain:
        raise ValidationError(f'Domain mismatch: {f.domain} vs {g.domain}.')
    domain = f.domain
    degree = f.degree + g.degree
    if degree > 4:
        return Form.zeros(4, domain, scalar=f.scalar, top=True)
    out = _scalar_zeros(degree, domain, f.coeffs, g.coeffs)
    for c1, left in enumerate(f.components):
        for c2, right in enumerate(g.components):
            if set(left) & set(right):
                continue
            shifted = g.coeffs[c2]
            for a in left:
                shifted = domain.translate(shifted, a, 1)
            target = component_index(tuple(sorted(left + right)))
            out[target] += cup_sign(left, right) * f.coeffs[c1] * shifted
    return Form(degree, domain, domain.clear_ghosts(out))


def _report_truncation(name, before, out):
    truncated = np.count_nonzero(out) < before
    if truncated:
        logger.warning(f'{name} moved support outside the padded storage')
    return truncated


def star(form):
    domain = form.domain
    out = _scalar_zeros(4 - form.degree, domain, form.coeffs)
    for c, dirs in enumerate(form.components):
        plane = form.coeffs[c]
        for a in dirs:
            plane = domain.translate(plane, a, -1)
        out[component_index(complement(dirs))] = STAR_SIGNS[dirs] * plane
    truncated = _report_truncation('star', np.count_nonzero(form.coeffs), out)
    return Form(4 - form.degree, domain, out, truncated=form.truncated or truncated)


def star_inverse(form):
    domain = form.domain
    degree = 4 - form.degree
    out = _scalar_zeros(degree, domain, form.coeffs)
    for c, dirs in enumerate(DIRECTION_SETS[degree]):
        plane = form.component(complement(dirs))
        for a in dirs:
            plane = domain.translate(plane, a, 1)
        out[c] = STAR_SIGNS[dirs] * plane
    truncated = _report_truncation('star_inverse', np.count_nonzero(form.coeffs), out)
    return Form(degree, domain, out, truncated=form.truncated or truncated)


def translate(form, offset):
    """Move every coefficient from k to k + offset."""
    coeffs = form.coeffs
    for axis, step in zip(AXES, offset):
        coeffs = form.domain.translate(coeffs, axis, -step)
    return Form(form.degree, form.domain, coeffs)


def _check_domain(f, g, domain):
    domain = domain or f.domain
    if f.domain != domain or g.domain != domain:
        raise ValidationError(f'Domain mismatch: {f.domain} vs {g.domain}.')
    return domain


def inner_product(f, g, domain=None):
    """<V, f u *g>; forms of different degree are orthogonal."""
    domain = _check_domain(f, g, domain)
    if f.degree != g.degree:
        return 0
    volume = cup(f, star(g))
    return volume.interior_values()[0].sum().item()


def signature_inner_product(f, g, domain=None):
    """Explicit signed sum over components, used to cross-check inner_product."""
    domain = _check_domain(f, g, domain)
    if f.degree != g.degree:
        return 0
    fi, gi = f.interior_values(), g.interior_values()
    return sum(time_sign(dirs) * (fi[c] * gi[c]).sum() for c, dirs in enumerate(f.components)).item()


def codifferential_via_star(form):
    """(-1)^(r+1) *^-1 d * applied to a form of degree r + 1."""
    if form.degree == 0:
        raise ValidationError('The star path needs a form of degree at least 1.')
    r = form.degree - 1
    dual = _coboundary(star(form), keep_upper=True)
    out = star_inverse(dual)
    sign = -1 if (r + 1) % 2 else 1
    return Form(r, form.domain, sign * form.domain.clear_ghosts(out.coeffs), truncated=out.truncated)


def laplacian(form):
    """-(d delta + delta d)."""
    out = Form.zeros(form.degree, form.domain, scalar=form.scalar)
    if form.degree > 0:
        out = out + _coboundary(codifferential(form))
    if form.degree < 4:
        out = out + codifferential(_coboundary(form))
    return -out


def dirac(field, sign=DIRAC_MINUS):
    """D_+ = d + delta or D_- = d - delta on an inhomogeneous form."""
    if sign not in dict(DIRAC_CHOICES):
        raise ValidationError(f'Unknown Dirac sign "{sign}".')
    factor = 1 if sign == DIRAC_PLUS else -1
    parts = []
    for r in range(5):
        part = Form.zeros(r, field.domain, scalar=field.scalar)
        if r > 0:
            part = part + _coboundary(field.part(r - 1))
        if r < 4:
            part = part + factor * codifferential(field.part(r + 1))
        parts.append(part)
    return InhomogeneousForm(parts)


def inner_product_inhomogeneous(a, b, domain=None):
    domain = domain or a.domain
    return sum(inner_product(a.part(r), b.part(r), domain) for r in range(5))


def apply_partwise(operator, field):
    """Apply a degree-preserving operator to every part of an inhomogeneous form."""
    return InhomogeneousForm(operator(part) for part in field.parts)


def _shift_degrees(field, operator, step):
    """Inhomogeneous image of a degree-changing operator: part r comes from part r - step."""
    parts = []
    for r in range(5):
        source = r - step
        if 0 <= source <= 4:
            parts.append(operator(field.part(source)))
        else:
            parts.append(Form.zeros(r, field.domain, scalar=field.scalar))
    return InhomogeneousForm(parts)


OPERATIONS = {
    'coboundary': (coboundary, 1),
    'codifferential': (codifferential, -1),
    'codifferential_via_star': (codifferential_via_star, -1),
    'star': (star, None),
    'star_inverse': (star_inverse, None),
    'laplacian': (laplacian, 0),
}
OPERATION_CHOICES = sorted(OPERATIONS) + ['dirac+', 'dirac-']


def apply_named(name, form):
    """Apply an operator by name to a Form or an InhomogeneousForm."""
    if name in ('dirac+', 'dirac-'):
        if not isinstance(form, InhomogeneousForm):
            raise ValidationError(f'"{name}" acts on inhomogeneous forms.')
        return dirac(form, name[-1])
    if name not in OPERATIONS:
        raise ValidationError(f'Unknown operation "{name}".')
    operator, step = OPERATIONS[name]
    if not isinstance(form, InhomogeneousForm):
        if name == 'codifferential_via_star' and form.degree == 0:
            return Form.zeros(0, form.domain, scalar=form.scalar)
        return operator(form)
    if step == 0:
        return apply_partwise(operator, form)
    if step is None:
        return InhomogeneousForm(operator(form.part(4 - r)) for r in range(5))
    return _shift_degrees(form, operator, step)
