from io import StringIO
import json
from pathlib import Path
import tempfile

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from cochains.reports import read_csv

from .export import read_matrix_market


class SpectralCommandTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.out = Path(self.tmp.name)

    def call(self, *args):
        stdout = StringIO()
        call_command(*args, '--out', str(self.out), stdout=stdout)
        return stdout.getvalue()


class AssembleCommandTest(SpectralCommandTestCase):
    def test_dirac_on_default_lattice(self):
        self.call('assemble', 'dirac-')
        matrix = read_matrix_market(self.out / 'dirac-.mtx')
        self.assertEqual(matrix.shape, (256, 256))
        index = json.loads((self.out / 'dirac-.index.json').read_text())
        self.assertEqual(index['boundary_mode'], 'periodic')
        self.assertEqual(len(index['columns']), 256)

    def test_degree_flag(self):
        self.call('assemble', 'coboundary', '--degree', '1', '--extents', '2,2,2,2')
        self.assertEqual(read_matrix_market(self.out / 'coboundary_1.mtx').shape, (96, 64))

    def test_two_mass(self):
        self.call('assemble', 'two_mass', '--mass', '0.5', '--mass2', '2')
        self.assertEqual(read_matrix_market(self.out / 'two_mass.mtx').shape, (256, 256))

    def test_missing_mass_exits_two(self):
        with self.assertRaises(CommandError) as caught:
            self.call('assemble', 'dk')
        self.assertEqual(caught.exception.returncode, 2)

    def test_unknown_operator_exits_two(self):
        with self.assertRaises(CommandError) as caught:
            self.call('assemble', 'curl_1')
        self.assertEqual(caught.exception.returncode, 2)

    def test_scalar_flag_is_not_accepted(self):
        with self.assertRaises(CommandError):
            self.call('assemble', 'dirac-', '--scalar', 'complex')


class SpectrumCommandTest(SpectralCommandTestCase):
    def test_laplacian_contains_zero(self):
        self.call('spectrum', 'laplacian_0')
        frame = read_csv(self.out / 'laplacian_0_spectrum.csv')
        self.assertEqual(list(frame.columns), ['index', 're', 'im', 'residual'])
        self.assertLess(np.min(np.hypot(frame['re'], frame['im'])), 1e-10)

    def test_dirac_squares_into_laplacian(self):
        self.call('spectrum', 'dirac-', '--count', '10', '--nonzero')
        self.call('spectrum', 'laplacian')
        dirac = read_csv(self.out / 'dirac-_spectrum.csv')
        laplacian = read_csv(self.out / 'laplacian_spectrum.csv')
        self.assertEqual(len(dirac), 10)
        targets = laplacian['re'].to_numpy() + 1j * laplacian['im'].to_numpy()
        for re, im in zip(dirac['re'], dirac['im']):
            self.assertLess(np.min(np.abs(targets - complex(re, im) ** 2)), 1e-8)

    @override_settings(DENSE_COLUMN_LIMIT=100)
    def test_size_guard_exits_two(self):
        with self.assertRaises(CommandError) as caught:
            self.call('spectrum', 'dirac-')
        self.assertEqual(caught.exception.returncode, 2)


class KernelCommandTest(SpectralCommandTestCase):
    def test_coboundary_kernel_is_constants(self):
        self.call('kernel', 'coboundary_0')
        payload = json.loads((self.out / 'coboundary_0_kernel.json').read_text())
        self.assertEqual(payload['dimension'], 1)
        vector = np.array(payload['vectors'][0]['re']) + 1j * np.array(payload['vectors'][0]['im'])
        self.assertLess(np.ptp(np.abs(vector)), 1e-12)

    def test_empty_kernel_warns(self):
        output = self.call('kernel', 'coboundary_0', '--boundary', 'zero')
        self.assertIn('empty', output)
        payload = json.loads((self.out / 'coboundary_0_kernel.json').read_text())
        self.assertEqual(payload['vectors'], [])

    def test_tolerance_is_recorded(self):
        self.call('kernel', 'laplacian_0', '--tol-kernel', '1e-9')
        payload = json.loads((self.out / 'laplacian_0_kernel.json').read_text())
        self.assertEqual(payload['tolerance'], 1e-9)
        self.assertGreaterEqual(payload['dimension'], 1)
