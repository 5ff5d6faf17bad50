import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from cochains.calculus import apply_partwise, coboundary, codifferential, laplacian
from cochains.forms import Form, InhomogeneousForm, random_form, random_inhomogeneous
from cochains.lattice import BOUNDARY_PERIODIC, Domain
from cochains.reports import STATUS_DIAGNOSTIC, STATUS_PASS

from .equations import dk_residual, eigen_solutions
from .massless import (
    GAUGE_D, GAUGE_DELTA, GAUGE_FULL, TwoMass, delta_invariance_check, dirac_invariance_check,
    electromagnetic_residual, em_limit_gauge_check, gauge_transform, harmonic_basis,
    inhomogeneous_norm, kernel_klein_gordon_check, notoph_gauge_check, notoph_residual,
    two_mass_kernel, two_mass_residual, wave_invariance_check,
)

ZERO = Domain((3, 3, 3, 3))
SMALL = Domain((2, 3, 2, 2))
PERIODIC = Domain((2, 2, 2, 2), BOUNDARY_PERIODIC)
SEEDS = st.integers(0, 2 ** 20)


def checks(report):
    return {check.name: check for check in report.checks}


class GaugeTransformTest(SimpleTestCase):
    def test_zero_gauge_form(self):
        field = random_inhomogeneous(ZERO, 1)
        zero = InhomogeneousForm.zeros(ZERO, scalar='integer')
        for kind in (GAUGE_D, GAUGE_DELTA, GAUGE_FULL):
            self.assertEqual(gauge_transform(field, zero, kind), field)

    def test_scalar_gauge_form(self):
        field = random_inhomogeneous(ZERO, 2)
        phi0 = random_form(0, ZERO, 3)
        phi = InhomogeneousForm.from_parts(ZERO, {0: phi0}, scalar='integer')
        moved = gauge_transform(field, phi, GAUGE_D)
        self.assertEqual(moved.part(0), field.part(0))
        self.assertEqual(moved.part(1), field.part(1) + coboundary(phi0))
        for r in (2, 3, 4):
            self.assertEqual(moved.part(r), field.part(r))

    def test_delta_kind(self):
        field = random_inhomogeneous(ZERO, 2)
        phi = random_inhomogeneous(ZERO, 3)
        moved = gauge_transform(field, phi, GAUGE_DELTA)
        self.assertEqual(moved.part(2), field.part(2) + codifferential(phi.part(3)))
        self.assertEqual(moved.part(4), field.part(4))

    def test_rejects_unknown_kind_and_mismatch(self):
        field = random_inhomogeneous(ZERO, 2)
        with self.assertRaises(ValidationError):
            gauge_transform(field, field, 'curl')
        with self.assertRaises(ValidationError):
            gauge_transform(field, random_inhomogeneous(SMALL, 2))

    @given(seed=SEEDS)
    @settings(max_examples=50, deadline=None)
    def test_shift_law(self, seed):
        for domain in (SMALL, PERIODIC):
            field = random_inhomogeneous(domain, seed)
            phi = random_inhomogeneous(domain, seed + 1)
            shift = dk_residual(gauge_transform(field, phi, GAUGE_FULL), 0) - dk_residual(field, 0)
            self.assertEqual(shift, apply_partwise(laplacian, phi))


class TwoMassTest(SimpleTestCase):
    def test_combined_mass(self):
        self.assertEqual(TwoMass(3, 3).combined, 3)
        self.assertEqual(TwoMass(-1, 4).combined, 2j)
        masses = TwoMass.from_eigenvalue(2j)
        self.assertEqual(masses.m1 * masses.m2, (2j) ** 2)

    @given(seed=SEEDS, mass=st.integers(-3, 3))
    @settings(max_examples=50, deadline=None)
    def test_specialisations(self, seed, mass):
        field = random_inhomogeneous(SMALL, seed)
        self.assertEqual(two_mass_residual(field, TwoMass(mass, mass)), dk_residual(field, mass))
        self.assertEqual(two_mass_residual(field, TwoMass(mass, 0)), electromagnetic_residual(field, mass))
        self.assertEqual(two_mass_residual(field, TwoMass(0, mass)), notoph_residual(field, mass))

    def test_massless_specialisation(self):
        field = random_inhomogeneous(ZERO, 4)
        self.assertEqual(two_mass_residual(field, TwoMass(0, 0)), dk_residual(field, 0))


class HarmonicBasisTest(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.basis = harmonic_basis(PERIODIC)
        cls.degreewise = harmonic_basis(PERIODIC, degreewise=True)

    def test_constant_scalar_is_harmonic(self):
        self.assertTrue(self.basis)
        vectors = np.column_stack([phi.vector() for phi in self.basis])
        constant = InhomogeneousForm.from_parts(
            PERIODIC, {0: Form(0, PERIODIC, np.ones((1, 2, 2, 2, 2)))},
        ).vector() / 4
        projection = vectors @ (vectors.conj().T @ constant)
        self.assertLess(np.linalg.norm(projection - constant), 1e-10)

    def test_every_vector_is_rechecked(self):
        for phi in self.basis + self.degreewise:
            residual = inhomogeneous_norm(apply_partwise(laplacian, phi))
            self.assertLessEqual(residual, 1e-8 * inhomogeneous_norm(phi))

    def test_degreewise_forms_have_one_degree(self):
        self.assertTrue(self.degreewise)
        for phi in self.degreewise:
            self.assertEqual(sum(1 for part in phi.parts if not part.is_zero()), 1)

    def test_zero_padded_may_be_empty(self):
        self.assertIsInstance(harmonic_basis(Domain((1, 1, 1, 1))), list)


class InvarianceTest(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.basis = harmonic_basis(PERIODIC, degreewise=True)
        cls.field = random_inhomogeneous(PERIODIC, 42, values='real')

    def harmonic(self, degree):
        for phi in self.basis:
            if not phi.part(degree).is_zero():
                return phi.part(degree)
        self.fail(f'No harmonic {degree}-form on {PERIODIC}')

    def harmonic_field(self):
        total = self.basis[0]
        for phi in self.basis[1:]:
            total = total + phi
        return total

    def test_zero_gauge_form_is_exact(self):
        field = random_inhomogeneous(SMALL, 1)
        zero = InhomogeneousForm.zeros(SMALL, scalar='integer')
        for check in (wave_invariance_check, delta_invariance_check, dirac_invariance_check):
            report = check(field, zero)
            self.assertTrue(report.passed, list(report.summary_lines()))
            self.assertTrue(all(c.status == STATUS_PASS for c in report.checks))

    def test_harmonic_gauge_forms(self):
        phi = self.harmonic_field()
        for check in (wave_invariance_check, delta_invariance_check, dirac_invariance_check):
            report = check(self.field, phi)
            self.assertTrue(report.passed, list(report.summary_lines()))
            self.assertFalse(any(c.status == STATUS_DIAGNOSTIC for c in report.checks))

    def test_non_harmonic_is_diagnostic(self):
        field = random_inhomogeneous(SMALL, 5)
        phi = random_inhomogeneous(SMALL, 6)
        report = wave_invariance_check(field, phi)
        result = checks(report)
        self.assertTrue(result['commutation_lap_d'].passed)
        self.assertEqual(result['wave_invariance_d'].status, STATUS_DIAGNOSTIC)
        expected = np.sqrt(sum(
            np.linalg.norm(coboundary(laplacian(phi.part(r))).vector()) ** 2 for r in range(4)
        ))
        self.assertAlmostEqual(result['wave_invariance_d'].deviation, expected)
        self.assertTrue(report.passed)

    def test_dirac_shift_law_for_arbitrary_forms(self):
        report = dirac_invariance_check(random_inhomogeneous(SMALL, 7), random_inhomogeneous(SMALL, 8))
        result = checks(report)
        self.assertTrue(result['shift_law'].exact)
        self.assertTrue(result['shift_law'].passed)
        self.assertEqual(result['massless_invariance'].status, STATUS_DIAGNOSTIC)

    def test_electromagnetic_limit(self):
        report = em_limit_gauge_check(self.field, self.harmonic(0), self.harmonic(4), 1.5)
        self.assertTrue(report.passed, list(report.summary_lines()))
        self.assertEqual(checks(report)['em_invariance'].status, STATUS_PASS)

    def test_electromagnetic_identities_for_arbitrary_forms(self):
        field = random_inhomogeneous(SMALL, 1)
        report = em_limit_gauge_check(field, random_form(0, SMALL, 2), random_form(4, SMALL, 3), 2)
        result = checks(report)
        for name in ('identity_phi0', 'identity_phi4', 'shift_phi0', 'shift_phi4', 'unchanged_middle'):
            self.assertTrue(result[name].exact and result[name].passed, name)
        self.assertEqual(result['em_invariance'].status, STATUS_DIAGNOSTIC)

    def test_electromagnetic_zero_gauge(self):
        report = em_limit_gauge_check(random_inhomogeneous(SMALL, 1), None, None, 2)
        self.assertTrue(all(c.status == STATUS_PASS for c in report.checks))

    def test_notoph_limit(self):
        report = notoph_gauge_check(self.field, self.harmonic(1), self.harmonic(3), 0.5)
        self.assertTrue(report.passed, list(report.summary_lines()))
        self.assertEqual(checks(report)['notoph_invariance'].status, STATUS_PASS)

    def test_notoph_structure_for_arbitrary_forms(self):
        field = random_inhomogeneous(SMALL, 4)
        report = notoph_gauge_check(field, random_form(1, SMALL, 5), random_form(3, SMALL, 6), 3)
        result = checks(report)
        for name in ('structural_unchanged', 'shift_phi1', 'shift_phi3'):
            self.assertTrue(result[name].passed, name)
        self.assertEqual(result['notoph_invariance'].status, STATUS_DIAGNOSTIC)


class TwoMassKernelTest(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        value, _ = eigen_solutions(PERIODIC, count=1)[0]
        cls.masses = TwoMass.from_eigenvalue(value)

    def test_kernel_is_nonempty_and_klein_gordon(self):
        report = kernel_klein_gordon_check(PERIODIC, self.masses)
        self.assertTrue(report.passed, list(report.summary_lines()))
        self.assertGreater(len(report.checks), 1)

    def test_kernel_vectors_solve_the_system(self):
        for field in two_mass_kernel(PERIODIC, self.masses):
            residual = two_mass_residual(field, self.masses)
            self.assertLessEqual(inhomogeneous_norm(residual), 1e-8 * inhomogeneous_norm(field))

    def test_empty_kernel_fails(self):
        report = kernel_klein_gordon_check(PERIODIC, TwoMass(0.3, 0.7))
        self.assertFalse(report.passed)
