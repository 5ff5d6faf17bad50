import json
from pathlib import Path
import tempfile

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase, override_settings
from hypothesis import given, settings, strategies as st

from cochains.calculus import (
    DIRAC_MINUS, DIRAC_PLUS, apply_partwise, coboundary, codifferential, dirac, inner_product,
    inner_product_inhomogeneous, laplacian, star,
)
from cochains.forms import basis_form, random_form, random_inhomogeneous
from cochains.lattice import BOUNDARY_PERIODIC, DIRECTION_SETS, Domain

from .assembly import (
    INHOMOGENEOUS, BasisIndex, assemble, field_from_vector, field_vector, gram_matrix, parse_tag,
)
from .export import export_index, export_matrix_market, read_matrix_market
from .linalg import SizeGuardError, eigenpairs, kernel

PERIODIC = Domain((2, 2, 2, 2), BOUNDARY_PERIODIC)
ZERO = Domain((2, 3, 2, 2))
SEEDS = st.integers(0, 2 ** 20)

DIRECT = {
    'coboundary': coboundary,
    'codifferential': codifferential,
    'laplacian': laplacian,
}


class BasisIndexTest(SimpleTestCase):
    def test_counts(self):
        for r in range(5):
            self.assertEqual(BasisIndex(PERIODIC, (r,)).size, len(DIRECTION_SETS[r]) * 16)
        self.assertEqual(BasisIndex(PERIODIC, INHOMOGENEOUS).size, 256)

    def test_labels_round_trip(self):
        basis = BasisIndex(ZERO, INHOMOGENEOUS)
        for column in (0, 5, 47, 100, basis.size - 1):
            self.assertEqual(basis.column(*basis.label(column)), column)
        self.assertEqual(basis.label(1), (0, (), (1, 1, 1, 2)))

    def test_records(self):
        records = BasisIndex(PERIODIC, (1,)).to_records()
        self.assertEqual(records[16], {'index': 16, 'degree': 1, 'dirs': [1], 'k': [1, 1, 1, 1]})


class AssemblyTest(SimpleTestCase):
    def test_coboundary_zero_shape(self):
        op = assemble('coboundary_0', PERIODIC)
        self.assertEqual(op.shape, (64, 16))
        counts = np.diff(op.matrix.tocsc().indptr)
        self.assertTrue(np.all(counts == 8))
        self.assertTrue(np.all(np.abs(op.matrix.data) == 1))

    def test_tags(self):
        self.assertEqual(parse_tag('coboundary_1'), ('coboundary', 1))
        self.assertEqual(parse_tag('dirac-'), ('dirac-', None))
        self.assertEqual(parse_tag('two_mass'), ('two_mass', None))
        with self.assertRaises(ValidationError):
            parse_tag('curl_1')
        with self.assertRaises(ValidationError):
            assemble('coboundary', PERIODIC)
        with self.assertRaises(ValidationError):
            assemble('dk', PERIODIC)

    def test_matches_direct_operators_on_every_basis_form(self):
        for domain in (PERIODIC, ZERO):
            for name, operator in DIRECT.items():
                for r in range(5):
                    if (name, r) in (('coboundary', 4), ('codifferential', 0)):
                        continue
                    op = assemble(f'{name}_{r}', domain)
                    for column, (degree, dirs, k) in enumerate(op.cols.labels()):
                        expected = operator(basis_form(degree, dirs, k, domain)).vector()
                        np.testing.assert_array_equal(op.matrix[:, column].toarray().ravel(), expected)

    def test_star_matches_direct_on_torus(self):
        for r in range(5):
            op = assemble('star', PERIODIC, degree=r)
            form = random_form(r, PERIODIC, r)
            np.testing.assert_array_equal(op.apply(form.vector()), star(form).vector())

    @given(seed=SEEDS)
    @settings(max_examples=50, deadline=None)
    def test_inhomogeneous_operators_match(self, seed):
        for domain in (PERIODIC, ZERO):
            field = random_inhomogeneous(domain, seed)
            vector = field_vector(field)
            for tag, sign in (('dirac+', DIRAC_PLUS), ('dirac-', DIRAC_MINUS)):
                np.testing.assert_array_equal(assemble(tag, domain).apply(vector), field_vector(dirac(field, sign)))
            np.testing.assert_array_equal(
                assemble('laplacian', domain).apply(vector),
                field_vector(apply_partwise(laplacian, field)),
            )
            dk = assemble('dk', domain, mass=2)
            expected = dirac(field, DIRAC_MINUS) - 2 * field
            np.testing.assert_array_equal(dk.apply(vector), field_vector(expected))

    def test_duffin_matrix(self):
        low, high = random_form(1, ZERO, 3), random_form(2, ZERO, 4)
        out_low, out_high = assemble('duffin_1', ZERO, mass=2).apply_forms(low, high)
        self.assertEqual(out_low, -1 * codifferential(high) - 2 * low)
        self.assertEqual(out_high, coboundary(low) - 2 * high)

    def test_two_mass_reduces_to_dk(self):
        a = assemble('two_mass', PERIODIC, mass=3, mass2=3).matrix
        b = assemble('dk', PERIODIC, mass=3).matrix
        self.assertEqual(abs(a - b).sum(), 0)

    def test_matrix_identities(self):
        for domain in (PERIODIC, ZERO):
            for r in range(3):
                product = assemble(f'coboundary_{r + 1}', domain).matrix @ assemble(f'coboundary_{r}', domain).matrix
                self.assertEqual(abs(product).sum(), 0)
            for r in range(2, 5):
                product = assemble(f'codifferential_{r - 1}', domain).matrix @ assemble(f'codifferential_{r}', domain).matrix
                self.assertEqual(abs(product).sum(), 0)
            dm = assemble('dirac-', domain).matrix
            lap = assemble('laplacian', domain).matrix
            self.assertEqual(abs(dm @ dm - lap).sum(), 0)

    def test_matrix_adjointness(self):
        for domain in (PERIODIC, ZERO):
            for r in range(4):
                d = assemble(f'coboundary_{r}', domain).matrix
                delta = assemble(f'codifferential_{r + 1}', domain).matrix
                g_low, g_high = gram_matrix(domain, r).matrix, gram_matrix(domain, r + 1).matrix
                self.assertEqual(abs(d.T @ g_high - g_low @ delta).sum(), 0)
            g = gram_matrix(domain).matrix
            dp, dm = assemble('dirac+', domain).matrix, assemble('dirac-', domain).matrix
            self.assertEqual(abs(dp.T @ g - g @ dp).sum(), 0)
            self.assertEqual(abs(dm.T @ g + g @ dm).sum(), 0)


class GramMatrixTest(SimpleTestCase):
    def test_signatures(self):
        n = PERIODIC.site_count
        one = gram_matrix(PERIODIC, 1).matrix.diagonal()
        self.assertEqual(one[::n].tolist(), [-1, 1, 1, 1])
        two = gram_matrix(PERIODIC, 2).matrix.diagonal()
        self.assertEqual(two[::n].tolist(), [-1, -1, -1, 1, 1, 1])
        three = gram_matrix(PERIODIC, 3).matrix.diagonal()
        self.assertEqual(three[::n].tolist(), [-1, -1, -1, 1])
        self.assertTrue(np.all(gram_matrix(PERIODIC, 4).matrix.diagonal() == -1))
        self.assertTrue(np.all(gram_matrix(PERIODIC, 0).matrix.diagonal() == 1))

    @given(seed=SEEDS, degree=st.integers(0, 4))
    @settings(max_examples=30, deadline=None)
    def test_matches_inner_product(self, seed, degree):
        f, g = random_form(degree, ZERO, seed), random_form(degree, ZERO, seed + 1)
        gram = gram_matrix(ZERO, degree).matrix
        self.assertEqual(f.vector() @ (gram @ g.vector()), inner_product(f, g))

    def test_inhomogeneous_gram(self):
        a, b = random_inhomogeneous(ZERO, 1), random_inhomogeneous(ZERO, 2)
        gram = gram_matrix(ZERO).matrix
        self.assertEqual(field_vector(a) @ (gram @ field_vector(b)), inner_product_inhomogeneous(a, b))


class LinalgTest(SimpleTestCase):
    def test_laplacian_kernel_contains_constants(self):
        vectors = kernel(assemble('laplacian_0', PERIODIC))
        basis = np.column_stack(vectors)
        constant = np.ones(16) / 4
        projection = basis @ (basis.conj().T @ constant)
        self.assertLess(np.linalg.norm(projection - constant), 1e-10)

    def test_coboundary_kernel_is_constants(self):
        op = assemble('coboundary_0', PERIODIC)
        vectors = kernel(op)
        self.assertEqual(len(vectors), 1)
        self.assertLess(np.ptp(np.abs(vectors[0])), 1e-12)
        for vector in vectors:
            self.assertLess(np.linalg.norm(op.apply(vector)), 1e-10)

    def test_zero_padded_kernel_may_be_empty(self):
        with self.assertLogs('spectra.linalg', level='WARNING'):
            self.assertEqual(kernel(assemble('coboundary_0', Domain((2, 2, 2, 2)))), [])

    @override_settings(DENSE_COLUMN_LIMIT=100)
    def test_size_guard(self):
        with self.assertRaises(SizeGuardError):
            kernel(assemble('dirac-', PERIODIC))

    def test_eigenpairs_of_dirac(self):
        op = assemble('dirac-', PERIODIC)
        pairs = eigenpairs(op, count=5, nonzero=True)
        self.assertEqual(len(pairs), 5)
        scale = np.linalg.norm(op.to_dense())
        for pair in pairs:
            self.assertLessEqual(pair.residual, 1e-8 * scale)
            field = field_from_vector(PERIODIC, pair.vector)
            residual = dirac(field, DIRAC_MINUS) - pair.value * field
            self.assertLessEqual(np.linalg.norm(field_vector(residual)), 1e-8 * scale)

    def test_dirac_eigenvalues_square_into_laplacian_spectrum(self):
        dirac_values = [p.value for p in eigenpairs(assemble('dirac-', PERIODIC))]
        laplacian_values = np.array([p.value for p in eigenpairs(assemble('laplacian', PERIODIC))])
        for value in dirac_values:
            self.assertLess(np.min(np.abs(laplacian_values - value ** 2)), 1e-8)

    def test_laplacian_spectrum_contains_zero(self):
        values = [p.value for p in eigenpairs(assemble('laplacian_0', PERIODIC))]
        self.assertLess(min(abs(v) for v in values), 1e-10)


class ExportTest(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def body(self, path):
        return [line for line in path.read_text().splitlines() if not line.startswith('%')]

    def test_identity(self):
        op = gram_matrix(Domain((1, 1, 1, 1)), 1)
        path = export_matrix_market(op, self.dir / 'gram.mtx')
        lines = path.read_text().splitlines()
        self.assertTrue(lines[0].startswith('%%MatrixMarket matrix coordinate real general'))
        body = self.body(path)
        self.assertEqual(body[0].split(), ['4', '4', '4'])
        self.assertEqual(len(body), 5)

    def test_entries_sorted_by_column_then_row(self):
        op = assemble('coboundary_1', PERIODIC)
        body = self.body(export_matrix_market(op, self.dir / 'd1.mtx'))
        triples = [(int(c), int(r)) for r, c, *_ in (line.split() for line in body[1:])]
        self.assertEqual(triples, sorted(triples))

    def test_round_trip(self):
        op = assemble('dk', PERIODIC, mass=0.5 + 0.25j)
        path = export_matrix_market(op, self.dir / 'dk.mtx')
        self.assertIn('complex', path.read_text().splitlines()[0])
        back = read_matrix_market(path)
        self.assertEqual(abs(back - op.matrix).sum(), 0)

    def test_dirac_has_256_columns(self):
        op = assemble('dirac-', PERIODIC)
        back = read_matrix_market(export_matrix_market(op, self.dir / 'dirac.mtx'))
        self.assertEqual(back.shape, (256, 256))

    def test_index(self):
        op = assemble('codifferential_2', PERIODIC)
        path = export_index(op, self.dir / 'delta.index.json')
        payload = json.loads(path.read_text())
        self.assertEqual(len(payload['columns']), 96)
        self.assertEqual(len(payload['rows']), 64)
        self.assertEqual(payload['columns'][0]['dirs'], [0, 1])
