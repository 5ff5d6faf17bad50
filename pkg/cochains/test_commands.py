from io import StringIO
import json
from pathlib import Path
import tempfile

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from .calculus import apply_named, translate
from .forms import InhomogeneousForm, basis_form, random_inhomogeneous
from .lattice import Domain
from .management.base import parse_extents, parse_mass
from .serializers import dump_form, load_form

ZERO = Domain((3, 3, 3, 3))
K = (2, 2, 2, 2)


class ParseTest(SimpleTestCase):
    def test_extents(self):
        self.assertEqual(parse_extents('2,3,2,2'), (2, 3, 2, 2))
        self.assertEqual(parse_extents((6, 4, 4, 4)), (6, 4, 4, 4))
        for bad in ('2,3', 'a,b,c,d'):
            with self.assertRaises(CommandError) as caught:
                parse_extents(bad)
            self.assertEqual(caught.exception.returncode, 2)

    def test_mass(self):
        self.assertEqual(parse_mass('2'), 2.0)
        self.assertEqual(parse_mass('-0.5'), -0.5)
        self.assertEqual(parse_mass('1+2j'), 1 + 2j)
        self.assertIsNone(parse_mass(None))
        with self.assertRaises(CommandError):
            parse_mass('heavy')


class ApplyCommandTest(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.out = Path(self.tmp.name)

    def apply(self, operation, form, output):
        source = dump_form(form, self.out / f'in_{output}')
        stdout = StringIO()
        call_command('apply', operation, str(source), '--out', str(self.out), '--output', output, stdout=stdout)
        return load_form(self.out / output), stdout.getvalue()

    def test_coboundary_of_top_degree_warns(self):
        result, output = self.apply('coboundary', basis_form(4, (0, 1, 2, 3), K, ZERO), 'top.json')
        self.assertIn('top degree', output)
        self.assertEqual(result.degree, 4)
        self.assertTrue(result.is_zero())

    def test_star_twice_translates(self):
        s = basis_form(1, (2,), (1, 1, 1, 1), ZERO)
        once, _ = self.apply('star', s, 'once.json')
        twice, _ = self.apply('star', once, 'twice.json')
        self.assertEqual(twice, translate(s, (1, 1, 1, 1)))

    def test_laplacian_stencil(self):
        result, _ = self.apply('laplacian', basis_form(0, (), K, ZERO), 'lap.json')
        expected = {K: -4}
        for axis in range(4):
            for step in (1, -1):
                k = list(K)
                k[axis] += step
                expected[tuple(k)] = -1 if axis == 0 else 1
        self.assertEqual({k: value for _, k, value in result.entries()}, expected)

    def test_inhomogeneous_input(self):
        field = random_inhomogeneous(ZERO, 3)
        result, _ = self.apply('dirac-', field, 'dirac.json')
        self.assertEqual(result, apply_named('dirac-', field))

    def test_default_output_name(self):
        source = dump_form(basis_form(0, (), K, ZERO), self.out / 'vertex.json')
        call_command('apply', 'coboundary', str(source), '--out', str(self.out), stdout=StringIO())
        self.assertTrue((self.out / 'coboundary_vertex.json').exists())

    def test_dirac_needs_inhomogeneous_form(self):
        source = dump_form(basis_form(1, (0,), K, ZERO), self.out / 'edge.json')
        with self.assertRaises(CommandError) as caught:
            call_command('apply', 'dirac+', str(source), '--out', str(self.out), stdout=StringIO())
        self.assertEqual(caught.exception.returncode, 2)

    def test_malformed_file_exits_two(self):
        source = self.out / 'broken.json'
        source.write_text(json.dumps({'degree': 1, 'extents': [3, 3, 3], 'entries': []}))
        with self.assertRaises(CommandError) as caught:
            call_command('apply', 'star', str(source), '--out', str(self.out), stdout=StringIO())
        self.assertEqual(caught.exception.returncode, 2)

    def test_missing_file_exits_two(self):
        with self.assertRaises(CommandError) as caught:
            call_command('apply', 'star', str(self.out / 'nope.json'), '--out', str(self.out), stdout=StringIO())
        self.assertEqual(caught.exception.returncode, 2)

    def test_zero_inhomogeneous_form(self):
        result, _ = self.apply('laplacian', InhomogeneousForm.zeros(ZERO, scalar='integer'), 'zero.json')
        self.assertTrue(result.is_zero())

    def test_scalar_comes_from_the_file(self):
        source = dump_form(basis_form(0, (), K, ZERO), self.out / 'vertex.json')
        with self.assertRaises(CommandError):
            call_command('apply', 'star', str(source), '--scalar', 'real', '--out', str(self.out), stdout=StringIO())
