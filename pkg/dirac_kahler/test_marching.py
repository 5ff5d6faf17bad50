import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from cochains.forms import InhomogeneousForm, basis_form
from cochains.lattice import ALL_DIRECTION_SETS, BOUNDARY_PERIODIC, Domain, is_time_like

from .equations import dk_residual_components
from .marching import (
    RESIDUAL_COLUMNS, cauchy_march, dirs_label, march_scalar, random_cauchy_data, residual_frame,
    window_klein_gordon, window_residuals, window_slices,
)

MARCH = Domain((6, 4, 4, 4))
TORUS = Domain((6, 4, 4, 4), BOUNDARY_PERIODIC)
STEPS = 4


class CauchyMarchTest(SimpleTestCase):
    def test_zero_data_gives_zero_field(self):
        field = cauchy_march(InhomogeneousForm.zeros(MARCH), 1.5, STEPS)
        self.assertTrue(field.is_zero())
        self.assertEqual(residual_frame(field, 1.5, STEPS)['residual'].max(), 0)

    def test_random_data_solves_the_window(self):
        for domain in (MARCH, TORUS):
            initial = random_cauchy_data(domain, 42)
            mass = 0.75
            field = cauchy_march(initial, mass, STEPS)
            scale = field.max_abs()
            residuals = window_residuals(field, mass, STEPS)
            self.assertEqual(set(residuals), set(ALL_DIRECTION_SETS))
            self.assertLessEqual(max(residuals.values()), 1e-12 * scale)
            self.assertLessEqual(window_klein_gordon(field, mass, STEPS), 1e-10 * scale)

    def test_integer_data_is_exact(self):
        initial = random_cauchy_data(MARCH, 7, values='integer')
        field = cauchy_march(initial, 1, STEPS)
        self.assertEqual(max(window_residuals(field, 1, STEPS).values()), 0)
        self.assertEqual(window_klein_gordon(field, 1, STEPS), 0)

    def test_complex_mass(self):
        mass = 0.5 + 0.5j
        field = cauchy_march(random_cauchy_data(MARCH, 3), mass, STEPS)
        self.assertLessEqual(max(window_residuals(field, mass, STEPS).values()), 1e-12 * field.max_abs())

    def test_initial_slice_is_kept(self):
        initial = random_cauchy_data(MARCH, 5)
        field = cauchy_march(initial, 0.5, STEPS)
        first = MARCH.time_slice(1)
        for before, after in zip(initial.parts, field.parts):
            np.testing.assert_array_equal(before.coeffs[(slice(None),) + first], after.coeffs[(slice(None),) + first])

    def test_time_like_equations_hold_on_first_slice(self):
        mass = 0.5
        field = cauchy_march(random_cauchy_data(MARCH, 9), mass, STEPS)
        planes = dk_residual_components(field, mass)
        for dirs in ALL_DIRECTION_SETS:
            if is_time_like(dirs):
                self.assertLessEqual(np.max(np.abs(planes[dirs][MARCH.time_slice(1)])), 1e-12 * field.max_abs())

    def test_every_sub_window_is_solved(self):
        mass = 0.5
        field = cauchy_march(random_cauchy_data(MARCH, 11), mass, STEPS)
        frame = residual_frame(field, mass, STEPS)
        for t in window_slices(STEPS):
            self.assertLessEqual(frame[frame['k0'] == t]['residual'].max(), 1e-12 * field.max_abs())

    def test_deterministic(self):
        first = cauchy_march(random_cauchy_data(MARCH, 21), 0.5, STEPS)
        second = cauchy_march(random_cauchy_data(MARCH, 21), 0.5, STEPS)
        self.assertEqual(first, second)

    @given(
        seed=st.integers(0, 2 ** 16),
        values=st.sampled_from(['integer', 'real', 'complex']),
        mass=st.sampled_from([2, 0.75, 0.5 + 0.5j]),
    )
    @settings(max_examples=25, deadline=None)
    def test_scalar_modes_keep_the_data(self, seed, values, mass):
        initial = random_cauchy_data(MARCH, seed, values=values)
        field = cauchy_march(initial, mass, STEPS)
        self.assertEqual(field.scalar, march_scalar(initial, mass))
        first = (slice(None),) + MARCH.time_slice(1)
        for before, after in zip(initial.parts, field.parts):
            np.testing.assert_array_equal(after.coeffs[first], before.coeffs[first])
        scale = max(field.max_abs(), 1.0)
        self.assertLessEqual(max(window_residuals(field, mass, STEPS).values()), 1e-12 * scale)

    def test_complex_data_with_real_mass_stays_complex(self):
        initial = random_cauchy_data(MARCH, 7, values='complex')
        field = cauchy_march(initial, 0.75, STEPS)
        self.assertEqual(field.scalar, 'complex')
        self.assertGreater(max(np.abs(p.coeffs.imag).max() for p in field.parts), 0)

    def test_march_scalar_promotion(self):
        integer = InhomogeneousForm.zeros(MARCH, scalar='integer')
        complex_data = InhomogeneousForm.zeros(MARCH, scalar='complex')
        self.assertEqual(march_scalar(integer, 2), 'integer')
        self.assertEqual(march_scalar(integer, 2.0), 'integer')
        self.assertEqual(march_scalar(integer, 0.75), 'real')
        self.assertEqual(march_scalar(integer, 1j), 'complex')
        self.assertEqual(march_scalar(complex_data, 0.75), 'complex')
        self.assertEqual(march_scalar(complex_data, 1), 'complex')

    def test_needs_enough_time_slices(self):
        with self.assertRaises(ValidationError):
            cauchy_march(InhomogeneousForm.zeros(MARCH), 1, 6)

    def test_rejects_data_off_the_first_slice(self):
        stray = basis_form(1, (2,), (2, 1, 1, 1), MARCH)
        initial = InhomogeneousForm.from_parts(MARCH, {1: stray}, scalar='integer')
        with self.assertRaisesMessage(ValidationError, 'time slice 1'):
            cauchy_march(initial, 1, STEPS)

    def test_rejects_non_positive_steps(self):
        with self.assertRaises(ValidationError):
            cauchy_march(InhomogeneousForm.zeros(MARCH), 1, 0)


class ResidualFrameTest(SimpleTestCase):
    def test_columns_and_rows(self):
        field = cauchy_march(random_cauchy_data(MARCH, 1), 0.5, STEPS)
        frame = residual_frame(field, 0.5, STEPS)
        self.assertEqual(list(frame.columns), RESIDUAL_COLUMNS)
        self.assertEqual(len(frame), 16 * (STEPS - 1) * 64)
        self.assertEqual(sorted(frame['equation'].unique()), list(range(1, 17)))
        self.assertEqual(frame['k0'].min(), 2)
        self.assertEqual(frame['k0'].max(), STEPS)

    def test_full_interior(self):
        frame = residual_frame(InhomogeneousForm.zeros(MARCH), 1)
        self.assertEqual(len(frame), 16 * MARCH.site_count)
        self.assertEqual(frame['k1'].min(), 1)
        self.assertEqual(frame['k1'].max(), 4)

    def test_dirs_label(self):
        self.assertEqual(dirs_label(()), '{}')
        self.assertEqual(dirs_label((0, 2, 3)), '{0,2,3}')
