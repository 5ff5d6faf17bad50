import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from cochains.calculus import DIRAC_MINUS, coboundary, dirac, laplacian
from cochains.forms import (
    SCALAR_COMPLEX, Form, InhomogeneousForm, basis_form, norm, random_form, random_inhomogeneous,
)
from cochains.lattice import ALL_DIRECTION_SETS, BOUNDARY_PERIODIC, Domain

from .equations import (
    EQUATIONS, DuffinPair, components_to_form, dk_residual, dk_residual_components, duffin_decompose,
    duffin_implies_kg_check, duffin_residual, duffin_uniqueness_defect, eigen_solutions,
    kg_bound, kg_propagation_identity, klein_gordon_residual, recompose,
)
from .massless import inhomogeneous_norm

ZERO = Domain((3, 3, 3, 3))
SMALL = Domain((2, 3, 2, 2))
PERIODIC = Domain((2, 2, 2, 2), BOUNDARY_PERIODIC)
K = (2, 2, 2, 2)
SEEDS = st.integers(0, 2 ** 20)


def shifted(k, axis, step):
    k = list(k)
    k[axis] += step
    return tuple(k)


class EquationTableTest(SimpleTestCase):
    def test_one_equation_per_direction_set(self):
        self.assertEqual(tuple(target for target, _ in EQUATIONS), ALL_DIRECTION_SETS)

    def test_each_equation_has_one_time_difference(self):
        for target, terms in EQUATIONS:
            self.assertEqual(sum(1 for _, axis, _, _ in terms if axis == 0), 1, target)

    def test_sources_are_neighbouring_degrees(self):
        for target, terms in EQUATIONS:
            for _, axis, _, source in terms:
                self.assertEqual(abs(len(source) - len(target)), 1)
                self.assertEqual(set(source) ^ set(target), {axis})


class DiracKahlerResidualTest(SimpleTestCase):
    def test_zero_field(self):
        zero = InhomogeneousForm.zeros(ZERO)
        self.assertTrue(dk_residual(zero, 3).is_zero())
        planes = dk_residual_components(zero, 3)
        self.assertTrue(all(not np.any(plane) for plane in planes.values()))

    def test_scalar_indicator(self):
        indicator = basis_form(0, (), K, ZERO)
        field = InhomogeneousForm.from_parts(ZERO, {0: indicator}, scalar='integer')
        residual = dk_residual(field, 1)
        self.assertEqual(residual.part(0), -indicator)
        self.assertEqual(residual.part(1), coboundary(indicator))
        for r in (2, 3, 4):
            self.assertTrue(residual.part(r).is_zero())

    @given(seed=SEEDS, mass=st.integers(-3, 3))
    @settings(max_examples=100, deadline=None)
    def test_components_match_operator(self, seed, mass):
        for domain in (ZERO, PERIODIC):
            field = random_inhomogeneous(domain, seed)
            planes = dk_residual_components(field, mass)
            self.assertEqual(components_to_form(planes, domain), dk_residual(field, mass))

    def test_pseudo_vector_equations_of_volume_element(self):
        volume = basis_form(4, (0, 1, 2, 3), K, ZERO)
        field = InhomogeneousForm.from_parts(ZERO, {4: volume}, scalar='integer')
        residual = components_to_form(dk_residual_components(field, 1), ZERO).part(3)
        signs = {(0, 1, 2): -1, (0, 1, 3): 1, (0, 2, 3): -1, (1, 2, 3): -1}
        for dirs, sign in signs.items():
            missing = ({0, 1, 2, 3} - set(dirs)).pop()
            self.assertEqual(residual[(dirs, K)], sign)
            self.assertEqual(residual[(dirs, shifted(K, missing, 1))], -sign)
        self.assertEqual(sum(1 for _ in residual.entries()), 8)

    def test_components_to_form_needs_all_planes(self):
        with self.assertRaises(ValidationError):
            components_to_form({(): np.zeros(ZERO.storage_shape)}, ZERO)

    @given(seed=SEEDS)
    @settings(max_examples=50, deadline=None)
    def test_squaring(self, seed):
        field = random_inhomogeneous(SMALL, seed)
        mass = 2
        residual = dk_residual(field, mass)
        lhs = dirac(dirac(field, DIRAC_MINUS), DIRAC_MINUS) - mass * mass * field
        rhs = dirac(residual, DIRAC_MINUS) + mass * residual
        self.assertEqual(lhs, rhs)


class KleinGordonTest(SimpleTestCase):
    def test_zero(self):
        self.assertTrue(klein_gordon_residual(Form.zeros(2, ZERO), 4).is_zero())

    def test_massless_is_laplacian(self):
        form = random_form(1, ZERO, 11)
        self.assertEqual(klein_gordon_residual(form, 0), laplacian(form))

    def test_partwise(self):
        field = random_inhomogeneous(SMALL, 5)
        out = klein_gordon_residual(field, 9)
        for r in range(5):
            self.assertEqual(out.part(r), laplacian(field.part(r)) - 9 * field.part(r))


class DuffinPairTest(SimpleTestCase):
    def test_degrees_must_be_consecutive(self):
        with self.assertRaises(ValidationError):
            DuffinPair(Form.zeros(1, ZERO), Form.zeros(3, ZERO))

    def test_domains_must_match(self):
        with self.assertRaises(ValidationError):
            DuffinPair(Form.zeros(1, ZERO), Form.zeros(2, SMALL))

    def test_zero_pair(self):
        residual = duffin_residual(DuffinPair(Form.zeros(0, ZERO), Form.zeros(1, ZERO)), 2)
        self.assertTrue(residual.low.is_zero())
        self.assertTrue(residual.high.is_zero())

    def test_high_residual_vanishes_by_construction(self):
        low = random_form(0, ZERO, 4)
        pair = DuffinPair(low, coboundary(low) * 0.5)
        self.assertTrue(duffin_residual(pair, 2).high.is_zero())

    def test_as_field(self):
        pair = DuffinPair(random_form(2, ZERO, 1), random_form(3, ZERO, 2))
        field = pair.as_field()
        self.assertEqual(field.part(2), pair.low)
        self.assertEqual(field.part(3), pair.high)
        self.assertTrue(field.part(0).is_zero())


class DuffinDecompositionTest(SimpleTestCase):
    def test_zero_mass_is_rejected(self):
        with self.assertRaisesMessage(ValidationError, 'division by mass'):
            duffin_decompose(random_inhomogeneous(ZERO, 1), 0)

    @given(seed=SEEDS)
    @settings(max_examples=50, deadline=None)
    def test_recomposition_is_exact_for_dyadic_mass(self, seed):
        field = random_inhomogeneous(ZERO, seed)
        pairs = duffin_decompose(field, 2)
        self.assertEqual([p.label for p in pairs], ['01', '12', '23', '34'])
        self.assertEqual(recompose(pairs), field)

    def test_recomposition_within_roundoff(self):
        field = random_inhomogeneous(ZERO, 8, values='real')
        back = recompose(duffin_decompose(field, 3.7))
        self.assertLess(inhomogeneous_norm(back - field), 1e-12 * max(inhomogeneous_norm(field), 1.0))

    def test_pairs_share_the_split_parts(self):
        field = random_inhomogeneous(ZERO, 3)
        pairs = duffin_decompose(field, 2)
        self.assertEqual(pairs[0].low, field.part(0))
        self.assertEqual(pairs[3].high, field.part(4))
        self.assertEqual(pairs[0].high + pairs[1].low, field.part(1))

    def test_uniqueness_defect(self):
        self.assertEqual(duffin_uniqueness_defect(PERIODIC, 2), 0)
        self.assertEqual(duffin_uniqueness_defect(Domain((2, 2, 2, 2)), 0.5 + 1j), 0)


class PropagationIdentityTest(SimpleTestCase):
    @given(seed=SEEDS, degree=st.integers(0, 3))
    @settings(max_examples=40, deadline=None)
    def test_identity_on_arbitrary_pairs(self, seed, degree):
        pair = DuffinPair(random_form(degree, SMALL, seed), random_form(degree + 1, SMALL, seed + 1))
        identity = kg_propagation_identity(pair, 2)
        self.assertEqual(identity.gap(), 0.0)

    def test_zero_pair(self):
        pair = DuffinPair(Form.zeros(1, ZERO), Form.zeros(2, ZERO))
        bounds = kg_bound(pair, 3)
        self.assertEqual(bounds.klein_gordon_low, 0.0)
        self.assertEqual(bounds.epsilon_high, 0.0)
        self.assertTrue(duffin_implies_kg_check(pair, 3).passed)

    def test_perturbed_pair_stays_within_bound(self):
        rng = np.random.default_rng(42)
        for degree in range(4):
            low = random_form(degree, SMALL, degree, values='real')
            pair = DuffinPair(low, coboundary(low) * 0.5)
            noise = random_form(degree + 1, SMALL, 0, values='real', rng=rng) * 1e-3
            perturbed = DuffinPair(pair.low, pair.high + noise)
            report = duffin_implies_kg_check(perturbed, 2)
            self.assertTrue(report.passed, list(report.summary_lines()))


class EigenSolutionTest(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.solutions = eigen_solutions(PERIODIC, count=5)

    def test_five_nonzero_solutions(self):
        self.assertEqual(len(self.solutions), 5)
        for mass, field in self.solutions:
            self.assertGreater(abs(mass), 1e-8)
            self.assertEqual(field.scalar, SCALAR_COMPLEX)

    def test_solutions_solve_the_equation(self):
        for mass, field in self.solutions:
            scale = inhomogeneous_norm(field)
            self.assertLessEqual(inhomogeneous_norm(dk_residual(field, mass)), 1e-8 * scale)
            self.assertLessEqual(inhomogeneous_norm(klein_gordon_residual(field, mass * mass)), 1e-8 * scale)

    def test_decomposition_yields_duffin_solutions(self):
        for mass, field in self.solutions:
            scale = inhomogeneous_norm(field)
            pairs = duffin_decompose(field, mass)
            for pair in pairs:
                residual = duffin_residual(pair, mass)
                self.assertLessEqual(max(norm(residual.low), norm(residual.high)), 1e-8 * scale)
                for form in (pair.low, pair.high):
                    self.assertLessEqual(norm(klein_gordon_residual(form, mass * mass)), 1e-8 * scale)
                self.assertTrue(duffin_implies_kg_check(pair, mass).passed)
            self.assertLessEqual(inhomogeneous_norm(recompose(pairs) - field), 1e-12 * scale)

    def test_uniqueness_at_eigenvalue(self):
        mass, _ = self.solutions[0]
        self.assertEqual(duffin_uniqueness_defect(PERIODIC, mass), 0)
