import json
from pathlib import Path
import tempfile

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st
from rest_framework.exceptions import ValidationError as SerializerValidationError

from .chains import Chain, boundary, domain_chain, pair
from .calculus import coboundary
from .forms import (
    SCALAR_COMPLEX, SCALAR_REAL, Form, InhomogeneousForm,
    basis_form, linear_combine, norm, random_form, random_inhomogeneous,
)
from .lattice import (
    ALL_DIRECTION_SETS, BACKWARD, BOUNDARY_PERIODIC, DIRECTION_SETS, FORWARD,
    Domain, complement, direction_set,
)
from .reports import Report, read_csv
from .serializers import FormSerializer, dump_form, form_to_data, load_form

ZERO = Domain((3, 3, 3, 3))
PERIODIC = Domain((3, 3, 3, 3), BOUNDARY_PERIODIC)
CENTRE = (2, 2, 2, 2)


class LatticeTest(SimpleTestCase):
    def test_shift_examples(self):
        self.assertEqual(ZERO.shift((1, 1, 1, 1), 0, FORWARD), (2, 1, 1, 1))
        self.assertEqual(ZERO.shift((1, 1, 1, 1), 2, BACKWARD), (1, 1, 0, 1))
        self.assertEqual(PERIODIC.shift((3, 1, 1, 1), 0, FORWARD), (1, 1, 1, 1))

    def test_shift_rejects_unknown_axis(self):
        with self.assertRaises(ValidationError):
            ZERO.shift((1, 1, 1, 1), 4)

    @given(k=st.tuples(*[st.integers(-5, 8)] * 4), axis=st.sampled_from([0, 1, 2, 3]))
    def test_forward_then_backward_is_identity(self, k, axis):
        self.assertEqual(ZERO.shift(ZERO.shift(k, axis, FORWARD), axis, BACKWARD), k)

    @given(k=st.tuples(*[st.integers(1, 3)] * 4), axis=st.sampled_from([0, 1, 2, 3]))
    def test_periodic_orbit_closes(self, k, axis):
        site = k
        for _ in range(PERIODIC.extents[axis]):
            site = PERIODIC.shift(site, axis, FORWARD)
        self.assertEqual(site, k)

    def test_complement(self):
        self.assertEqual(complement(()), (0, 1, 2, 3))
        self.assertEqual(complement((0,)), (1, 2, 3))
        self.assertEqual(complement((0, 2)), (1, 3))
        for dirs in ALL_DIRECTION_SETS:
            self.assertEqual(complement(complement(dirs)), dirs)

    def test_direction_sets_are_lexicographic(self):
        self.assertEqual(DIRECTION_SETS[2], ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)))
        self.assertEqual(len(ALL_DIRECTION_SETS), 16)

    def test_direction_set_validation(self):
        with self.assertRaises(ValidationError):
            direction_set((1, 0))
        with self.assertRaises(ValidationError):
            direction_set((4,))

    def test_enumerate_sites(self):
        self.assertEqual(Domain((1, 1, 1, 1)).enumerate_sites(), [(1, 1, 1, 1)])
        self.assertEqual(Domain((2, 1, 1, 1)).enumerate_sites(), [(1, 1, 1, 1), (2, 1, 1, 1)])
        self.assertEqual(len(Domain((2, 2, 2, 2)).enumerate_sites()), 16)
        self.assertEqual(len(Domain((2, 2, 2, 2)).enumerate_sites(padded=True)), 256)
        sites = Domain((2, 2, 2, 2)).enumerate_sites()
        self.assertEqual(sites[1], (1, 1, 1, 2))

    def test_domain_validation(self):
        with self.assertRaises(ValidationError):
            Domain((3, 3, 3))
        with self.assertRaises(ValidationError):
            Domain((3, 0, 3, 3))
        with self.assertRaises(ValidationError):
            Domain((3, 3, 3, 3), 'mirror')

    def test_translate_zero_fills(self):
        plane = np.zeros(ZERO.storage_shape, dtype=int)
        plane[3, 2, 2, 2] = 5
        moved = ZERO.translate(plane, 0, 1)
        self.assertEqual(moved[2, 2, 2, 2], 5)
        self.assertEqual(ZERO.translate(moved, 0, -1)[3, 2, 2, 2], 5)
        self.assertFalse(ZERO.translate(plane, 0, 4).any())


class FormTest(SimpleTestCase):
    def test_basis_form(self):
        form = basis_form(2, (0, 1), CENTRE, ZERO)
        self.assertEqual(form[(0, 1), CENTRE], 1)
        self.assertEqual(np.count_nonzero(form.coeffs), 1)
        self.assertEqual(basis_form(0, (), (1, 1, 1, 1), ZERO)[(), (1, 1, 1, 1)], 1)

    def test_basis_form_rejects_bad_labels(self):
        with self.assertRaises(ValidationError):
            basis_form(1, (0, 1), CENTRE, ZERO)
        with self.assertRaises(ValidationError):
            basis_form(1, (0,), (0, 1, 1, 1), ZERO)

    def test_linear_combine(self):
        f = random_form(2, ZERO, 3)
        self.assertTrue(linear_combine(1, f, -1, f).is_zero())
        e = basis_form(1, (0,), CENTRE, ZERO)
        doubled = linear_combine(2, e, 0, random_form(1, ZERO, 5))
        self.assertEqual(doubled[(0,), CENTRE], 2)
        both = linear_combine(1, e, 1, basis_form(1, (1,), CENTRE, ZERO))
        self.assertEqual([v for _, _, v in both.entries()], [1, 1])

    def test_linear_combine_rejects_mismatch(self):
        with self.assertRaises(ValidationError):
            linear_combine(1, random_form(1, ZERO, 1), 1, random_form(2, ZERO, 1))
        with self.assertRaises(ValidationError):
            linear_combine(1, random_form(1, ZERO, 1), 1, random_form(1, PERIODIC, 1))

    @given(seed=st.integers(0, 2 ** 16))
    @settings(max_examples=30, deadline=None)
    def test_integer_addition_is_exact(self, seed):
        f, g, h = (random_form(3, ZERO, seed + n) for n in range(3))
        self.assertEqual((f + g) + h, f + (g + h))
        self.assertEqual(f + g, g + f)

    def test_random_form_contract(self):
        self.assertEqual(random_form(2, ZERO, 7), random_form(2, ZERO, 7))
        form = random_form(2, ZERO, 7)
        self.assertTrue(form.support_ok())
        self.assertTrue(np.all(np.abs(form.coeffs) <= 3))
        self.assertEqual(form.coeffs.dtype, np.int64)
        self.assertEqual(random_form(1, ZERO, 1, SCALAR_COMPLEX).scalar, SCALAR_COMPLEX)

    def test_vector_round_trip_keeps_basis_order(self):
        form = basis_form(1, (1,), (1, 1, 1, 2), ZERO)
        vector = form.vector()
        self.assertEqual(np.flatnonzero(vector).tolist(), [81 + 1])
        self.assertEqual(Form.from_vector(1, ZERO, vector), form)

    def test_inhomogeneous_form(self):
        field = random_inhomogeneous(ZERO, 11)
        self.assertEqual(len(field.vector()), 16 * 81)
        self.assertEqual(InhomogeneousForm.from_vector(ZERO, field.vector()), field)
        self.assertTrue((field - field).is_zero())
        with self.assertRaises(ValidationError):
            InhomogeneousForm([random_form(0, ZERO, 1)] * 5)

    def test_norm(self):
        self.assertEqual(norm(basis_form(3, (0, 1, 2), CENTRE, ZERO)), 1.0)
        self.assertAlmostEqual(norm(2 * basis_form(0, (), CENTRE, ZERO, SCALAR_REAL)), 2.0)


class ChainTest(SimpleTestCase):
    def test_boundary_of_volume_element(self):
        k = (1, 1, 1, 1)
        expected = Chain(3, {
            ((1, 2, 3), (2, 1, 1, 1)): 1, ((1, 2, 3), k): -1,
            ((0, 2, 3), (1, 2, 1, 1)): -1, ((0, 2, 3), k): 1,
            ((0, 1, 3), (1, 1, 2, 1)): 1, ((0, 1, 3), k): -1,
            ((0, 1, 2), (1, 1, 1, 2)): -1, ((0, 1, 2), k): 1,
        })
        self.assertEqual(boundary(Chain.basis((0, 1, 2, 3), k)), expected)

    def test_vertex_boundary_is_zero(self):
        self.assertTrue(boundary(Chain.basis((), CENTRE)).is_zero())

    def test_boundary_squared_vanishes(self):
        for dirs in ALL_DIRECTION_SETS:
            if len(dirs) >= 2:
                self.assertTrue(boundary(boundary(Chain.basis(dirs, CENTRE))).is_zero(), dirs)

    def test_pairing(self):
        volume = basis_form(4, (0, 1, 2, 3), CENTRE, ZERO)
        self.assertEqual(pair(Chain.basis((0, 1, 2, 3), CENTRE), volume), 1)
        self.assertEqual(pair(Chain.basis((), CENTRE), basis_form(1, (0,), CENTRE, ZERO)), 0)
        self.assertEqual(pair(2 * Chain.basis((0, 1, 2, 3), CENTRE), 3 * volume), 6)

    def test_domain_chain(self):
        self.assertEqual(domain_chain(Domain((1, 1, 1, 1))), Chain.basis((0, 1, 2, 3), (1, 1, 1, 1)))
        self.assertEqual(len(domain_chain(Domain((2, 1, 1, 1))).coeffs), 2)

    def test_boundary_of_domain_keeps_extreme_faces(self):
        domain = Domain((2, 2, 1, 1))
        faces = boundary(domain_chain(domain))
        for (dirs, k), value in faces.coeffs.items():
            missing = complement(dirs)[0]
            self.assertIn(k[missing], (1, domain.extents[missing] + 1))
            outward = 1 if k[missing] > 1 else -1
            self.assertEqual(value, (-1) ** missing * outward)
        # two faces per transverse site: 2 + 2 + 4 + 4 sites across the four axes
        self.assertEqual(len(faces.coeffs), 24)

    @given(seed=st.integers(0, 2 ** 16), dirs=st.sampled_from([d for d in ALL_DIRECTION_SETS if d]))
    @settings(max_examples=40, deadline=None)
    def test_duality(self, seed, dirs):
        omega = random_form(len(dirs) - 1, ZERO, seed)
        chain = Chain.basis(dirs, CENTRE)
        self.assertEqual(pair(boundary(chain), omega), pair(chain, coboundary(omega)))


class FormSerializerTest(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def test_round_trip_through_file(self):
        form = random_form(2, ZERO, 9)
        path = dump_form(form, Path(self.tmp.name) / 'form.json')
        self.assertEqual(load_form(path), form)

    def test_inhomogeneous_complex_round_trip(self):
        field = random_inhomogeneous(PERIODIC, 4, SCALAR_COMPLEX)
        path = dump_form(field, Path(self.tmp.name) / 'field.json')
        with open(path) as handle:
            self.assertIsNone(json.load(handle)['degree'])
        self.assertEqual(load_form(path), field)

    def test_rejects_degree_label_mismatch(self):
        data = form_to_data(basis_form(1, (0,), CENTRE, ZERO))
        data['entries'][0]['dirs'] = [0, 1]
        serializer = FormSerializer(data=data)
        self.assertFalse(serializer.is_valid())
        self.assertIn('entries', serializer.errors)

    def test_rejects_unsorted_dirs_and_bad_sites(self):
        data = form_to_data(basis_form(2, (0, 1), CENTRE, ZERO))
        data['entries'][0]['dirs'] = [1, 0]
        self.assertFalse(FormSerializer(data=data).is_valid())
        data['entries'][0]['dirs'] = [0, 1]
        data['entries'][0]['k'] = [9, 1, 1, 1]
        self.assertFalse(FormSerializer(data=data).is_valid())

    def test_rejects_fractional_integer_values(self):
        data = form_to_data(basis_form(0, (), CENTRE, ZERO))
        data['entries'][0]['re'] = 0.5
        self.assertFalse(FormSerializer(data=data).is_valid())

    def test_malformed_json(self):
        path = Path(self.tmp.name) / 'broken.json'
        path.write_text('{"degree": ')
        with self.assertRaises(SerializerValidationError):
            load_form(path)


class ReportTest(SimpleTestCase):
    def test_csv_has_timestamp_header(self):
        report = Report('demo', tolerance=1e-12)
        report.record('exact-zero', 0, 0, exact=True)
        report.record('loose', 1e-3, 1e-6)
        self.assertFalse(report.passed)
        self.assertEqual(len(report.failures), 1)
        with tempfile.TemporaryDirectory() as tmp:
            path = report.write_csv(Path(tmp) / 'report.csv')
            self.assertTrue(path.read_text().startswith('# generated_at'))
            frame = read_csv(path)
        self.assertEqual(frame['status'].tolist(), ['pass', 'fail'])
