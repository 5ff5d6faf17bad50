"""
Property suites behind ``manage.py verify``.

Each suite fills a Report with one record per property. Random inputs come
from seeds ``config.seed .. config.seed + PROPERTY_SAMPLES - 1`` so any
counterexample can be rebuilt with ``random_form(..., seed)``. Checks on
integer data are exact; floating point data is judged against
``TOL_IDENTITY * (|lhs| + |rhs| + 1)``.
"""
from itertools import product
import logging

import numpy as np
from django.conf import settings

from cochains.calculus import (
    DIRAC_MINUS, DIRAC_PLUS, apply_partwise, coboundary, codifferential, codifferential_via_star, cup,
    dirac, inner_product, inner_product_inhomogeneous, laplacian, star, translate,
)
from cochains.chains import Chain, boundary, pair
from cochains.forms import SCALAR_INTEGER, basis_form, random_form, random_inhomogeneous
from cochains.lattice import ALL_DIRECTION_SETS, DIRECTION_SETS, Domain
from cochains.reports import Report
from dirac_kahler.equations import (
    DuffinPair, components_to_form, dk_residual, dk_residual_components, duffin_decompose,
    duffin_implies_kg_check, duffin_residual, duffin_uniqueness_defect, eigen_solutions,
    kg_propagation_identity, klein_gordon_residual, recompose,
)
from dirac_kahler.marching import cauchy_march, random_cauchy_data, window_klein_gordon, window_residuals
from dirac_kahler.massless import (
    GAUGE_FULL, TwoMass, delta_invariance_check, dirac_invariance_check, electromagnetic_residual,
    em_limit_gauge_check, gauge_transform, harmonic_basis, inhomogeneous_norm, kernel_klein_gordon_check,
    notoph_gauge_check, notoph_residual, two_mass_residual, wave_invariance_check,
)
from spectra.assembly import assemble, gram_matrix

logger = logging.getLogger(__name__)

# Hodge star of each basis class: sign and complementary direction set.
EXPECTED_STAR = {
    (): (1, (0, 1, 2, 3)),
    (0,): (-1, (1, 2, 3)), (1,): (-1, (0, 2, 3)), (2,): (1, (0, 1, 3)), (3,): (-1, (0, 1, 2)),
    (0, 1): (-1, (2, 3)), (0, 2): (1, (1, 3)), (0, 3): (-1, (1, 2)),
    (1, 2): (1, (0, 3)), (1, 3): (-1, (0, 2)), (2, 3): (1, (0, 1)),
    (0, 1, 2): (-1, (3,)), (0, 1, 3): (1, (2,)), (0, 2, 3): (-1, (1,)), (1, 2, 3): (-1, (0,)),
    (0, 1, 2, 3): (-1, ()),
}

# <e, e> for a single basis element: minus exactly when the time axis is an edge.
EXPECTED_SIGNATURE = {dirs: -1 if 0 in dirs else 1 for dirs in ALL_DIRECTION_SETS}

EIGEN_SOLUTIONS = 5
DUFFIN_TEST_MASS = 2


def _difference(lhs, rhs):
    if isinstance(lhs, (int, float, complex, np.number)):
        return abs(lhs - rhs), abs(lhs) + abs(rhs)
    return (lhs - rhs).max_abs(), lhs.max_abs() + rhs.max_abs()


class Sweep:
    """Worst deviation of one property over many samples, recorded as a single check."""

    def __init__(self, name, exact, tol=None):
        self.name = name
        self.exact = exact
        self.tol = settings.TOL_IDENTITY if tol is None else tol
        self.samples = 0
        self.worst = 0.0
        self.counterexample = None
        self.note = ''

    def compare(self, lhs, rhs, counterexample=None, label=''):
        deviation, size = _difference(lhs, rhs)
        relative = deviation if self.exact else deviation / (size + 1.0)
        self.observe(relative, counterexample, label)

    def vanishes(self, value, source, counterexample=None, label=''):
        """The form ``value``, computed from ``source``, must be zero."""
        deviation = value.max_abs()
        self.observe(deviation if self.exact else deviation / (source.max_abs() + 1.0), counterexample, label)

    def observe(self, deviation, counterexample=None, label=''):
        self.samples += 1
        failed = deviation != 0 if self.exact else deviation > self.tol
        if failed and self.counterexample is None:
            self.counterexample = counterexample
            self.note = f'first failure: {label}' if label else ''
        self.worst = max(self.worst, float(deviation))

    def record(self, report):
        note = self.note or f'{self.samples} samples'
        return report.record(
            self.name, self.worst, 0.0 if self.exact else self.tol,
            exact=self.exact, counterexample=self.counterexample, note=note,
        )


def seeds(config, count=None):
    count = settings.PROPERTY_SAMPLES if count is None else count
    return range(config.seed, config.seed + count)


def _exact(config):
    return config.scalar == SCALAR_INTEGER


def _random_chain(domain, degree, rng, terms=8):
    sites = domain.enumerate_sites()
    coeffs = {}
    for _ in range(terms):
        dirs = DIRECTION_SETS[degree][rng.integers(len(DIRECTION_SETS[degree]))]
        coeffs[(dirs, sites[rng.integers(len(sites))])] = int(rng.integers(-3, 4))
    return Chain(degree, coeffs)


def calculus_suite(config):
    """Nilpotency, Leibniz, the star table and the two codifferential paths."""
    report = Report('calculus', tolerance=config.tol_identity)
    domain, values, exact = config.domain, config.scalar, _exact(config)

    for degree in range(3):
        sweep = Sweep(f'dd_zero_degree_{degree}', exact)
        for seed in seeds(config):
            form = random_form(degree, domain, seed, values)
            sweep.vanishes(coboundary(coboundary(form)), form, form, f'seed {seed}')
        sweep.record(report)

    for degree in range(2, 5):
        sweep = Sweep(f'delta_delta_zero_degree_{degree}', exact)
        for seed in seeds(config):
            form = random_form(degree, domain, seed, values)
            sweep.vanishes(codifferential(codifferential(form)), form, form, f'seed {seed}')
        sweep.record(report)

    sweep = Sweep('boundary_boundary_zero', exact=True)
    for seed in seeds(config):
        rng = np.random.default_rng(seed)
        for degree in range(2, 5):
            twice = boundary(boundary(_random_chain(domain, degree, rng)))
            sweep.observe(len(twice.coeffs), label=f'seed {seed} degree {degree}')
    sweep.record(report)

    pairs = [(p, q) for p in range(4) for q in range(4) if p + q <= 3]
    for p, q in pairs:
        sweep = Sweep(f'leibniz_{p}_{q}', exact)
        for seed in seeds(config, max(settings.PROPERTY_SAMPLES // 2, 1)):
            f, g = random_form(p, domain, seed, values), random_form(q, domain, seed + 1, values)
            left = coboundary(cup(f, g))
            right = cup(coboundary(f), g) + (-1) ** p * cup(f, coboundary(g))
            sweep.compare(left, right, f, f'seeds {seed}, {seed + 1}')
        sweep.record(report)

    _star_rules(report, domain)

    for degree in range(1, 5):
        sweep = Sweep(f'codifferential_star_path_degree_{degree}', exact)
        for seed in seeds(config):
            form = random_form(degree, domain, seed, values)
            sweep.compare(codifferential(form), codifferential_via_star(form), form, f'seed {seed}')
        sweep.record(report)
    return report


def _star_rules(report, domain):
    k = (1, 1, 1, 1)
    table = Sweep('star_table', exact=True)
    relation = Sweep('star_defining_relation', exact=True)
    double = Sweep('double_star', exact=True)
    volume = basis_form(4, (0, 1, 2, 3), k, domain)
    for dirs, (sign, dual) in EXPECTED_STAR.items():
        s = basis_form(len(dirs), dirs, k, domain)
        shifted = tuple(k[a] + (1 if a in dirs else 0) for a in range(4))
        image = star(s)
        off_target = np.count_nonzero(image.coeffs) - (1 if image[dual, shifted] else 0)
        table.observe(abs(image[dual, shifted] - sign) + off_target, s, f'class {dirs}')
        relation.compare(cup(s, image), EXPECTED_SIGNATURE[dirs] * volume, s, f'class {dirs}')
        r = len(dirs)
        double.compare(star(image), (-1) ** (r + 1) * translate(s, (1, 1, 1, 1)), s, f'class {dirs}')
    for sweep in (table, relation, double):
        sweep.record(report)


def duality_suite(config):
    """Chain-cochain duality over every interior basis chain, and the signature of the inner product."""
    report = Report('duality', tolerance=config.tol_identity)
    domain, values, exact = config.domain, config.scalar, _exact(config)
    sites = domain.enumerate_sites()

    for degree in range(1, 5):
        sweep = Sweep(f'duality_degree_{degree}', exact)
        for seed in seeds(config, 5):
            omega = random_form(degree - 1, domain, seed, values)
            d_omega = coboundary(omega)
            for dirs, k in product(DIRECTION_SETS[degree], sites):
                chain = Chain.basis(dirs, k)
                sweep.compare(pair(boundary(chain), omega), pair(chain, d_omega), omega, f'seed {seed} chain {dirs} {k}')
        sweep.record(report)

    k = sites[0]
    sweep = Sweep('signature', exact=True)
    for dirs, sign in EXPECTED_SIGNATURE.items():
        e = basis_form(len(dirs), dirs, k, domain)
        sweep.compare(inner_product(e, e), sign, e, f'class {dirs}')
    sweep.record(report)
    return report


def _sparse_deviation(a, b):
    diff = (a - b).tocoo()
    return float(np.max(np.abs(diff.data), initial=0.0))


def adjointness_suite(config):
    """Adjointness of d and delta, self-adjointness of the Laplacian, (anti-)symmetry of D+ and D-."""
    report = Report('adjointness', tolerance=config.tol_identity)
    domain, values, exact = config.domain, config.scalar, _exact(config)

    for degree in range(4):
        sweep = Sweep(f'adjoint_d_delta_degree_{degree}', exact)
        lap = Sweep(f'laplacian_self_adjoint_degree_{degree}', exact)
        for seed in seeds(config):
            phi = random_form(degree, domain, seed, values)
            psi = random_form(degree + 1, domain, seed + 1, values)
            sweep.compare(inner_product(coboundary(phi), psi), inner_product(phi, codifferential(psi)), phi, f'seeds {seed}, {seed + 1}')
            other = random_form(degree, domain, seed + 1, values)
            lap.compare(inner_product(laplacian(phi), other), inner_product(phi, laplacian(other)), phi, f'seeds {seed}, {seed + 1}')
        sweep.record(report)
        lap.record(report)

    plus = Sweep('dirac_plus_self_adjoint', exact)
    minus = Sweep('dirac_minus_anti_self_adjoint', exact)
    for seed in seeds(config):
        a, b = random_inhomogeneous(domain, seed, values), random_inhomogeneous(domain, seed + 1, values)
        plus.compare(inner_product_inhomogeneous(dirac(a, DIRAC_PLUS), b), inner_product_inhomogeneous(a, dirac(b, DIRAC_PLUS)), a, f'seed {seed}')
        minus.compare(inner_product_inhomogeneous(dirac(a, DIRAC_MINUS), b), -inner_product_inhomogeneous(a, dirac(b, DIRAC_MINUS)), a, f'seed {seed}')
    plus.record(report)
    minus.record(report)

    for degree in range(4):
        d = assemble(f'coboundary_{degree}', domain).matrix
        delta = assemble(f'codifferential_{degree + 1}', domain).matrix
        gram_low, gram_high = gram_matrix(domain, degree).matrix, gram_matrix(domain, degree + 1).matrix
        report.record(f'matrix_adjoint_degree_{degree}', _sparse_deviation(d.T @ gram_high, gram_low @ delta), 0, exact=True)

    gram = gram_matrix(domain).matrix
    gd_plus = gram @ assemble('dirac+', domain).matrix
    gd_minus = gram @ assemble('dirac-', domain).matrix
    report.record('matrix_dirac_plus_symmetric', _sparse_deviation(gd_plus, gd_plus.T), 0, exact=True)
    report.record('matrix_dirac_minus_antisymmetric', _sparse_deviation(gd_minus, -gd_minus.T), 0, exact=True)
    return report


def dirac_suite(config):
    """The sixteen difference equations, the square of D-, and the marching solver."""
    report = Report('dirac', tolerance=config.tol_identity)
    domain, values, exact = config.domain, config.scalar, _exact(config)

    components = Sweep('component_equations', exact)
    squaring = Sweep('dirac_minus_squared_is_laplacian', exact)
    for n, seed in enumerate(seeds(config, max(settings.PROPERTY_SAMPLES // 2, 1))):
        field = random_inhomogeneous(domain, seed, values)
        mass = n % 7 - 3
        planes = dk_residual_components(field, mass)
        components.compare(components_to_form(planes, domain), dk_residual(field, mass), field, f'seed {seed} m={mass}')
        squaring.compare(dirac(dirac(field, DIRAC_MINUS), DIRAC_MINUS), apply_partwise(laplacian, field), field, f'seed {seed}')
    components.record(report)
    squaring.record(report)

    march_domain = Domain(settings.MARCH_EXTENTS, config.boundary)
    steps = march_domain.extents[0] - 2
    mass = 0.75
    initial = random_cauchy_data(march_domain, config.seed)
    field = cauchy_march(initial, mass, steps)
    scale = max(field.max_abs(), 1.0)
    report.record(
        'march_window_residual', max(window_residuals(field, mass, steps).values()), config.tol_identity * scale,
        counterexample=initial, note=f'{march_domain}, {steps} steps',
    )
    report.record(
        'march_window_klein_gordon', window_klein_gordon(field, mass, steps), 100 * config.tol_identity * scale,
        counterexample=initial,
    )
    return report


def duffin_suite(config):
    """Duffin decomposition of eigen-solutions, Klein-Gordon propagation and uniqueness."""
    report = Report('duffin', tolerance=config.tol_eigen)
    domain, values, exact = config.domain, config.scalar, _exact(config)

    identity = Sweep('propagation_identity', exact)
    resum = Sweep('recomposition', exact)
    for n, seed in enumerate(seeds(config, max(settings.PROPERTY_SAMPLES // 4, 1))):
        degree = n % 4
        duffin = DuffinPair(random_form(degree, domain, seed, values), random_form(degree + 1, domain, seed + 1, values))
        found = kg_propagation_identity(duffin, DUFFIN_TEST_MASS)
        identity.compare(found.klein_gordon.as_field(), found.predicted.as_field(), duffin.low, f'seeds {seed}, {seed + 1}')
        field = random_inhomogeneous(domain, seed, values)
        resum.compare(recompose(duffin_decompose(field, DUFFIN_TEST_MASS)), field, field, f'seed {seed}')
    identity.record(report)
    resum.record(report)

    spectral = config.spectral_domain
    solutions = eigen_solutions(spectral, count=EIGEN_SOLUTIONS)
    report.record(
        'eigen_solutions_found', EIGEN_SOLUTIONS - len(solutions), 0, exact=True,
        note=f'{len(solutions)} on {spectral}',
    )
    for n, (mass, field) in enumerate(solutions):
        scale = inhomogeneous_norm(field)
        pairs = duffin_decompose(field, mass)
        worst = max(inhomogeneous_norm(duffin_residual(p, mass).as_field()) for p in pairs)
        report.record(f'solution_{n}_duffin_residual', worst, config.tol_eigen * scale, counterexample=field, note=f'm = {mass:.6g}')
        kg = max(inhomogeneous_norm(klein_gordon_residual(p.as_field(), mass * mass)) for p in pairs)
        report.record(f'solution_{n}_klein_gordon', kg, config.tol_eigen * scale, counterexample=field)
        report.record(
            f'solution_{n}_recomposition', inhomogeneous_norm(recompose(pairs) - field),
            config.tol_identity * max(scale, 1.0), counterexample=field,
        )
        for duffin in pairs:
            for check in duffin_implies_kg_check(duffin, mass, tol=config.tol_eigen).checks:
                check.name = f'solution_{n}_{check.name}'
                report.add(check)

    if solutions:
        mass = solutions[0][0]
        report.record('uniqueness_defect', duffin_uniqueness_defect(spectral, mass), 0, exact=True, note=f'm = {mass:.6g}')
    return report


def _sum_fields(fields):
    total = fields[0]
    for field in fields[1:]:
        total = total + field
    return total


def _harmonic_part(basis, degree):
    for phi in basis:
        if not phi.part(degree).is_zero():
            return phi.part(degree)
    return None


def gauge_suite(config):
    """Gauge shift laws on arbitrary forms and invariance under harmonic gauge forms."""
    report = Report('gauge', tolerance=config.tol_eigen)
    domain, values, exact = config.domain, config.scalar, _exact(config)

    shift = Sweep('shift_law', exact)
    specialisations = Sweep('two_mass_specialisations', exact)
    for n, seed in enumerate(seeds(config, max(settings.PROPERTY_SAMPLES // 4, 1))):
        field = random_inhomogeneous(domain, seed, values)
        phi = random_inhomogeneous(domain, seed + 1, values)
        moved = dk_residual(gauge_transform(field, phi, GAUGE_FULL), 0) - dk_residual(field, 0)
        shift.compare(moved, apply_partwise(laplacian, phi), phi, f'seeds {seed}, {seed + 1}')
        mass = n % 7 - 3
        specialisations.compare(two_mass_residual(field, TwoMass(mass, mass)), dk_residual(field, mass), field, f'seed {seed}')
        specialisations.compare(two_mass_residual(field, TwoMass(mass, 0)), electromagnetic_residual(field, mass), field, f'seed {seed}')
        specialisations.compare(two_mass_residual(field, TwoMass(0, mass)), notoph_residual(field, mass), field, f'seed {seed}')
    shift.record(report)
    specialisations.record(report)

    spectral = config.spectral_domain
    basis = harmonic_basis(spectral, degreewise=True)
    report.record('harmonic_basis_nonempty', 0 if basis else 1, 0, exact=True, note=f'{len(basis)} forms on {spectral}')
    if basis:
        phi = _sum_fields(basis)
        field = random_inhomogeneous(spectral, config.seed, values='real')
        for check in (wave_invariance_check, delta_invariance_check, dirac_invariance_check):
            report.extend(check(field, phi, tol=config.tol_eigen))
        parts = {r: _harmonic_part(basis, r) for r in range(5)}
        report.extend(em_limit_gauge_check(field, parts[0], parts[4], 1.5, tol=config.tol_eigen))
        report.extend(notoph_gauge_check(field, parts[1], parts[3], 0.5, tol=config.tol_eigen))

    solutions = eigen_solutions(spectral, count=1)
    if solutions:
        masses = TwoMass.from_eigenvalue(solutions[0][0])
        report.extend(kernel_klein_gordon_check(spectral, masses, tol=config.tol_eigen))
    else:
        report.record('kernel_nonempty', 1, 0, exact=True, note=f'no eigen-solution on {spectral}')
    return report


SUITES = {
    'calculus': calculus_suite,
    'duality': duality_suite,
    'adjointness': adjointness_suite,
    'dirac': dirac_suite,
    'duffin': duffin_suite,
    'gauge': gauge_suite,
}
SUITE_ALL = 'all'
SUITE_CHOICES = list(SUITES) + [SUITE_ALL]


def run_suites(name, config):
    """Run one suite, or every suite for 'all', into a combined report."""
    names = list(SUITES) if name == SUITE_ALL else [name]
    report = Report(f'verify {name}', tolerance=config.tol_identity)
    for suite in names:
        logger.info(f'Running suite {suite} on {config.domain}')
        report.extend(SUITES[suite](config))
    return report
