from itertools import product

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from .calculus import (
    DIRAC_MINUS, DIRAC_PLUS, STAR_SIGNS, apply_partwise, coboundary, codifferential,
    codifferential_via_star, cup, cup_sign, dirac, inner_product, inner_product_inhomogeneous,
    laplacian, signature_inner_product, star, star_inverse, time_sign, translate,
)
from .forms import (
    SCALAR_REAL, Form, InhomogeneousForm, basis_form, random_form, random_inhomogeneous,
)
from .lattice import ALL_DIRECTION_SETS, BOUNDARY_PERIODIC, DIRECTION_SETS, Domain, complement

ZERO = Domain((3, 3, 3, 3))
PERIODIC = Domain((3, 2, 3, 2), BOUNDARY_PERIODIC)
K = (2, 2, 2, 2)
SEEDS = st.integers(0, 2 ** 20)

# Star tables: direction set -> (sign, complementary set).
STAR_RULES = {
    (): (1, (0, 1, 2, 3)),
    (0,): (-1, (1, 2, 3)), (1,): (-1, (0, 2, 3)), (2,): (1, (0, 1, 3)), (3,): (-1, (0, 1, 2)),
    (0, 1): (-1, (2, 3)), (0, 2): (1, (1, 3)), (0, 3): (-1, (1, 2)),
    (1, 2): (1, (0, 3)), (1, 3): (-1, (0, 2)), (2, 3): (1, (0, 1)),
    (0, 1, 2): (-1, (3,)), (0, 1, 3): (1, (2,)), (0, 2, 3): (-1, (1,)), (1, 2, 3): (-1, (0,)),
    (0, 1, 2, 3): (-1, ()),
}


def at(k, axis, step):
    k = list(k)
    k[axis] += step
    return tuple(k)


def forward_difference(domain, plane, axis):
    return domain.translate(plane, axis, 1) - plane


def reference_coboundary(form):
    """Degree-specific coboundary formulas written out component by component."""
    domain, out = form.domain, Form.zeros(form.degree + 1, form.domain, scalar=form.scalar)
    D = lambda dirs, axis: forward_difference(domain, form.component(dirs), axis)
    if form.degree == 0:
        for i in range(4):
            out.component((i,))[...] = D((), i)
    elif form.degree == 1:
        for i, j in DIRECTION_SETS[2]:
            out.component((i, j))[...] = D((j,), i) - D((i,), j)
    elif form.degree == 2:
        for i, j, l in DIRECTION_SETS[3]:
            out.component((i, j, l))[...] = D((j, l), i) - D((i, l), j) + D((i, j), l)
    else:
        out.component((0, 1, 2, 3))[...] = (
            D((1, 2, 3), 0) - D((0, 2, 3), 1) + D((0, 1, 3), 2) - D((0, 1, 2), 3)
        )
    out.coeffs = domain.clear_ghosts(out.coeffs)
    return out


class CoboundaryTest(SimpleTestCase):
    def test_zero_form_indicator(self):
        out = coboundary(basis_form(0, (), K, ZERO))
        for i in range(4):
            self.assertEqual(out[(i,), K], -1)
            self.assertEqual(out[(i,), at(K, i, -1)], 1)
        self.assertEqual(np.count_nonzero(out.coeffs), 8)

    def test_time_edge(self):
        out = coboundary(basis_form(1, (0,), K, ZERO))
        for j in (1, 2, 3):
            self.assertEqual(out[(0, j), K], 1)
            self.assertEqual(out[(0, j), at(K, j, -1)], -1)
        self.assertEqual(np.count_nonzero(out.coeffs), 6)

    def test_top_degree_is_zero(self):
        with self.assertLogs('cochains.calculus', level='WARNING') as logs:
            out = coboundary(random_form(4, ZERO, 1))
        self.assertTrue(out.is_zero())
        self.assertTrue(out.top)
        self.assertIn('top degree', logs.output[0])

    @given(seed=SEEDS, degree=st.integers(0, 3))
    @settings(max_examples=40, deadline=None)
    def test_matches_degree_formulas(self, seed, degree):
        form = random_form(degree, ZERO, seed)
        self.assertEqual(coboundary(form), reference_coboundary(form))

    @given(seed=SEEDS, degree=st.integers(0, 2))
    @settings(max_examples=40, deadline=None)
    def test_coboundary_squared_vanishes(self, seed, degree):
        for domain in (ZERO, PERIODIC):
            self.assertTrue(coboundary(coboundary(random_form(degree, domain, seed))).is_zero())

    def test_support_stays_interior(self):
        for degree in range(4):
            self.assertTrue(coboundary(random_form(degree, ZERO, degree)).support_ok())


class CupTest(SimpleTestCase):
    def test_vertex_times_volume(self):
        volume = basis_form(4, (0, 1, 2, 3), K, ZERO)
        self.assertEqual(cup(basis_form(0, (), K, ZERO), volume), volume)

    def test_time_edge_with_its_star(self):
        e0 = basis_form(1, (0,), K, ZERO)
        self.assertEqual(cup(e0, star(e0)), -1 * basis_form(4, (0, 1, 2, 3), K, ZERO))

    def test_volume_squared_vanishes(self):
        volume = basis_form(4, (0, 1, 2, 3), K, ZERO)
        self.assertTrue(cup(volume, volume).is_zero())

    def test_cup_sign_counts_transpositions(self):
        for left, right in product(ALL_DIRECTION_SETS, repeat=2):
            if set(left) & set(right):
                continue
            inversions = sum(1 for a in left for b in right if b < a)
            self.assertEqual(cup_sign(left, right), (-1) ** inversions, (left, right))

    @given(seed=SEEDS, p=st.integers(0, 3), q=st.integers(0, 3))
    @settings(max_examples=60, deadline=None)
    def test_leibniz_rule(self, seed, p, q):
        if p + q > 3:
            q = 3 - p
        f, g = random_form(p, ZERO, seed), random_form(q, ZERO, seed + 1)
        left = coboundary(cup(f, g))
        right = cup(coboundary(f), g) + (-1) ** p * cup(f, coboundary(g))
        self.assertEqual(left, right)


class StarTest(SimpleTestCase):
    def test_table_rules(self):
        for dirs, (sign, dual) in STAR_RULES.items():
            out = star(basis_form(len(dirs), dirs, K, ZERO))
            shifted = tuple(K[a] + (1 if a in dirs else 0) for a in range(4))
            self.assertEqual(out[dual, shifted], sign, dirs)
            self.assertEqual(np.count_nonzero(out.coeffs), 1)
            self.assertEqual(STAR_SIGNS[dirs], sign)

    def test_worked_examples(self):
        self.assertEqual(star(basis_form(0, (), K, ZERO)), basis_form(4, (0, 1, 2, 3), K, ZERO))
        self.assertEqual(star(basis_form(1, (0,), K, ZERO)), -1 * basis_form(3, (1, 2, 3), at(K, 0, 1), ZERO))
        self.assertEqual(star(basis_form(2, (0, 2), K, ZERO)), basis_form(2, (1, 3), (3, 2, 3, 2), ZERO))

    def test_defining_relation(self):
        for dirs in ALL_DIRECTION_SETS:
            s = basis_form(len(dirs), dirs, K, ZERO)
            expected = time_sign(dirs) * basis_form(4, (0, 1, 2, 3), K, ZERO)
            self.assertEqual(cup(s, star(s)), expected, dirs)

    def test_double_star(self):
        for dirs in ALL_DIRECTION_SETS:
            r = len(dirs)
            s = basis_form(r, dirs, (1, 1, 1, 1), ZERO)
            self.assertEqual(star(star(s)), (-1) ** (r + 1) * translate(s, (1, 1, 1, 1)), dirs)

    @given(seed=SEEDS, degree=st.integers(0, 4))
    @settings(max_examples=30, deadline=None)
    def test_inverse_round_trips(self, seed, degree):
        for domain in (ZERO, PERIODIC):
            form = random_form(degree, domain, seed)
            self.assertEqual(star_inverse(star(form)), form)
            self.assertFalse(star_inverse(star(form)).truncated)
        periodic = random_form(degree, PERIODIC, seed)
        self.assertEqual(star(star_inverse(periodic)), periodic)

    def test_inverse_examples(self):
        self.assertEqual(star_inverse(basis_form(4, (0, 1, 2, 3), K, ZERO)), basis_form(0, (), K, ZERO))
        e01 = basis_form(2, (0, 1), K, ZERO)
        self.assertEqual(star_inverse(star(e01)), e01)

    def test_truncation_is_flagged(self):
        corner = basis_form(2, (0, 1), (3, 3, 3, 3), ZERO)
        twice = star(star(corner))
        self.assertFalse(twice.truncated)
        self.assertEqual(twice[(0, 1), (4, 4, 4, 4)], -1)
        with self.assertLogs('cochains.calculus', level='WARNING'):
            thrice = star(twice)
        self.assertTrue(thrice.truncated)
        self.assertTrue(thrice.is_zero())


class InnerProductTest(SimpleTestCase):
    def test_signature_examples(self):
        c = 3
        self.assertEqual(inner_product(c * basis_form(1, (0,), K, ZERO), c * basis_form(1, (0,), K, ZERO)), -c * c)
        x = basis_form(0, (), K, ZERO)
        self.assertEqual(inner_product(x, x), 1)
        self.assertEqual(inner_product(x, basis_form(2, (0, 1), K, ZERO)), 0)

    def test_single_component_signs(self):
        expected = {
            (): 1, (0,): -1, (1,): 1, (2,): 1, (3,): 1,
            (0, 1): -1, (0, 2): -1, (0, 3): -1, (1, 2): 1, (1, 3): 1, (2, 3): 1,
            (0, 1, 2): -1, (0, 1, 3): -1, (0, 2, 3): -1, (1, 2, 3): 1,
            (0, 1, 2, 3): -1,
        }
        for dirs, sign in expected.items():
            e = basis_form(len(dirs), dirs, (3, 1, 3, 1), ZERO)
            self.assertEqual(inner_product(e, e), sign, dirs)

    @given(seed=SEEDS, degree=st.integers(0, 4))
    @settings(max_examples=40, deadline=None)
    def test_matches_signature_sums(self, seed, degree):
        for domain in (ZERO, PERIODIC):
            f, g = random_form(degree, domain, seed), random_form(degree, domain, seed + 7)
            self.assertEqual(inner_product(f, g), signature_inner_product(f, g))

    def test_inhomogeneous(self):
        self.assertEqual(inner_product_inhomogeneous(
            InhomogeneousForm.from_parts(ZERO, {0: basis_form(0, (), K, ZERO)}, scalar='integer'),
            InhomogeneousForm.from_parts(ZERO, {0: basis_form(0, (), K, ZERO)}, scalar='integer'),
        ), 1)
        top = InhomogeneousForm.from_parts(ZERO, {4: basis_form(4, (0, 1, 2, 3), K, ZERO)}, scalar='integer')
        self.assertEqual(inner_product_inhomogeneous(top, top), -1)

    @given(seed=SEEDS)
    @settings(max_examples=20, deadline=None)
    def test_inhomogeneous_bilinearity(self, seed):
        a, b, c = (random_inhomogeneous(ZERO, seed + n) for n in range(3))
        self.assertEqual(
            inner_product_inhomogeneous(2 * a - b, c),
            2 * inner_product_inhomogeneous(a, c) - inner_product_inhomogeneous(b, c),
        )


class CodifferentialTest(SimpleTestCase):
    def test_time_edge(self):
        out = codifferential(basis_form(1, (0,), K, ZERO))
        self.assertEqual(out[(), K], 1)
        self.assertEqual(out[(), at(K, 0, 1)], -1)
        self.assertEqual(np.count_nonzero(out.coeffs), 2)

    def test_space_edge(self):
        out = codifferential(basis_form(1, (2,), K, ZERO))
        self.assertEqual(out[(), K], -1)
        self.assertEqual(out[(), at(K, 2, 1)], 1)

    def test_zero_form(self):
        out = codifferential(random_form(0, ZERO, 3))
        self.assertEqual(out.degree, 0)
        self.assertTrue(out.is_zero())

    def test_volume_element(self):
        expected = {(1, 2, 3): (1, 0), (0, 2, 3): (1, 1), (0, 1, 3): (-1, 2), (0, 1, 2): (1, 3)}
        out = codifferential(basis_form(4, (0, 1, 2, 3), K, ZERO))
        via_star = codifferential_via_star(basis_form(4, (0, 1, 2, 3), K, ZERO))
        self.assertEqual(out, via_star)
        for dirs, (sign, axis) in expected.items():
            self.assertEqual(out[dirs, K], sign)
            self.assertEqual(out[dirs, at(K, axis, 1)], -sign)

    @given(seed=SEEDS, degree=st.integers(2, 4))
    @settings(max_examples=40, deadline=None)
    def test_codifferential_squared_vanishes(self, seed, degree):
        for domain in (ZERO, PERIODIC):
            self.assertTrue(codifferential(codifferential(random_form(degree, domain, seed))).is_zero())

    @given(seed=SEEDS, degree=st.integers(1, 4))
    @settings(max_examples=40, deadline=None)
    def test_star_path_agrees(self, seed, degree):
        for domain in (ZERO, PERIODIC):
            form = random_form(degree, domain, seed)
            via_star = codifferential_via_star(form)
            self.assertEqual(via_star, codifferential(form))
            self.assertFalse(via_star.truncated)

    def test_star_path_of_zero(self):
        self.assertTrue(codifferential_via_star(Form.zeros(2, ZERO, scalar='integer')).is_zero())

    @given(seed=SEEDS, degree=st.integers(0, 3))
    @settings(max_examples=40, deadline=None)
    def test_adjointness(self, seed, degree):
        for domain in (ZERO, PERIODIC):
            f, g = random_form(degree, domain, seed), random_form(degree + 1, domain, seed + 1)
            self.assertEqual(inner_product(coboundary(f), g), inner_product(f, codifferential(g)))

    @given(seed=SEEDS, degree=st.integers(0, 3))
    @settings(max_examples=20, deadline=None)
    def test_adjointness_real(self, seed, degree):
        f = random_form(degree, ZERO, seed, SCALAR_REAL)
        g = random_form(degree + 1, ZERO, seed + 1, SCALAR_REAL)
        lhs, rhs = inner_product(coboundary(f), g), inner_product(f, codifferential(g))
        self.assertLessEqual(abs(lhs - rhs), 1e-12 * (abs(lhs) + abs(rhs) + 1))


class LaplacianTest(SimpleTestCase):
    def test_dalembertian_stencil(self):
        out = laplacian(basis_form(0, (), K, ZERO))
        self.assertEqual(out[(), K], -4)
        self.assertEqual(out[(), at(K, 0, 1)], -1)
        self.assertEqual(out[(), at(K, 0, -1)], -1)
        for i in (1, 2, 3):
            self.assertEqual(out[(), at(K, i, 1)], 1)
            self.assertEqual(out[(), at(K, i, -1)], 1)
        self.assertEqual(np.count_nonzero(out.coeffs), 9)

    @given(seed=SEEDS)
    @settings(max_examples=20, deadline=None)
    def test_dirac_squares_to_laplacian(self, seed):
        for domain in (ZERO, PERIODIC):
            field = random_inhomogeneous(domain, seed)
            self.assertEqual(dirac(dirac(field, DIRAC_MINUS), DIRAC_MINUS), apply_partwise(laplacian, field))

    @given(seed=SEEDS, degree=st.integers(0, 3))
    @settings(max_examples=30, deadline=None)
    def test_commutes_with_coboundary(self, seed, degree):
        form = random_form(degree, ZERO, seed)
        self.assertEqual(laplacian(coboundary(form)), coboundary(laplacian(form)))

    @given(seed=SEEDS, degree=st.integers(1, 4))
    @settings(max_examples=30, deadline=None)
    def test_commutes_with_codifferential(self, seed, degree):
        form = random_form(degree, ZERO, seed)
        self.assertEqual(laplacian(codifferential(form)), codifferential(laplacian(form)))

    @given(seed=SEEDS, degree=st.integers(0, 4))
    @settings(max_examples=30, deadline=None)
    def test_self_adjoint(self, seed, degree):
        f, g = random_form(degree, ZERO, seed), random_form(degree, ZERO, seed + 3)
        self.assertEqual(inner_product(laplacian(f), g), inner_product(f, laplacian(g)))


class DiracTest(SimpleTestCase):
    def test_scalar_only_field(self):
        scalar = random_form(0, ZERO, 5)
        field = InhomogeneousForm.from_parts(ZERO, {0: scalar}, scalar='integer')
        out = dirac(field, DIRAC_MINUS)
        self.assertEqual(out.part(1), coboundary(scalar))
        for r in (0, 2, 3, 4):
            self.assertTrue(out.part(r).is_zero())
        self.assertEqual(dirac(field, DIRAC_PLUS), out)

    @given(seed=SEEDS)
    @settings(max_examples=20, deadline=None)
    def test_gram_twisted_symmetry(self, seed):
        a, b = random_inhomogeneous(ZERO, seed), random_inhomogeneous(ZERO, seed + 1)
        self.assertEqual(
            inner_product_inhomogeneous(dirac(a, DIRAC_PLUS), b),
            inner_product_inhomogeneous(a, dirac(b, DIRAC_PLUS)),
        )
        self.assertEqual(
            inner_product_inhomogeneous(dirac(a, DIRAC_MINUS), b),
            -inner_product_inhomogeneous(a, dirac(b, DIRAC_MINUS)),
        )

    def test_complement_is_consistent_with_star_rules(self):
        for dirs, (_, dual) in STAR_RULES.items():
            self.assertEqual(complement(dirs), dual)
