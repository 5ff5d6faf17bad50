from io import StringIO
import json
from pathlib import Path
import tempfile
from unittest import mock

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from cochains.lattice import Domain
from cochains.management.base import RunConfig
from cochains.reports import read_csv
from cochains.serializers import load_form

from .suites import SUITES, Sweep, adjointness_suite, calculus_suite, duality_suite, duffin_suite, run_suites


def make_config(out, scalar='integer', extents=(3, 3, 3, 3), **spectral):
    return RunConfig(
        extents=extents, boundary='zero', scalar=scalar, seed=42,
        tol_identity=1e-12, tol_eigen=1e-8, tol_kernel=1e-10, output_dir=Path(out), **spectral,
    )


class SweepTest(SimpleTestCase):
    def test_exact_sweep_keeps_first_counterexample(self):
        sweep = Sweep('sample', exact=True)
        sweep.observe(0, 'a')
        sweep.observe(2, 'b', 'second')
        sweep.observe(5, 'c', 'third')
        self.assertEqual(sweep.worst, 5)
        self.assertEqual(sweep.counterexample, 'b')
        self.assertEqual(sweep.note, 'first failure: second')

    def test_relative_sweep(self):
        sweep = Sweep('sample', exact=False, tol=1e-12)
        sweep.compare(1.0, 1.0 + 1e-15)
        self.assertIsNone(sweep.counterexample)
        sweep.compare(1.0, 1.1, 'bad')
        self.assertEqual(sweep.counterexample, 'bad')


@override_settings(PROPERTY_SAMPLES=6)
class SuiteTest(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def test_calculus_is_exact_in_integer_mode(self):
        report = calculus_suite(make_config(self.tmp.name))
        self.assertTrue(report.passed, list(report.summary_lines()))
        self.assertTrue(all(check.exact for check in report.checks))

    def test_calculus_real_mode_uses_tolerance(self):
        report = calculus_suite(make_config(self.tmp.name, scalar='real'))
        self.assertTrue(report.passed, list(report.summary_lines()))
        self.assertFalse(all(check.exact for check in report.checks))

    def test_duality(self):
        report = duality_suite(make_config(self.tmp.name, extents=(2, 2, 2, 2)))
        self.assertTrue(report.passed, list(report.summary_lines()))
        self.assertIn('signature', [check.name for check in report.checks])

    def test_adjointness(self):
        report = adjointness_suite(make_config(self.tmp.name, extents=(2, 3, 2, 2)))
        self.assertTrue(report.passed, list(report.summary_lines()))

    def test_star_mutation_is_caught(self):
        with mock.patch.dict('cochains.calculus.STAR_SIGNS', {(0, 2): -1}):
            report = calculus_suite(make_config(self.tmp.name))
        self.assertFalse(report.passed)
        failing = report.first_counterexample()
        self.assertIsNotNone(failing)

    @override_settings(SPECTRAL_EXTENTS=(3, 3, 3, 3))
    def test_duffin_suite_runs_on_configured_spectral_lattice(self):
        config = make_config(self.tmp.name, extents=(2, 2, 2, 2), spectral_extents=(2, 2, 2, 2))
        report = duffin_suite(config)
        found = next(check for check in report.checks if check.name == 'eigen_solutions_found')
        self.assertIn('2x2x2x2 periodic', found.note)
        self.assertTrue(report.passed, list(report.summary_lines()))

    def test_run_suites_tags_rows_by_suite(self):
        report = run_suites('duality', make_config(self.tmp.name, extents=(2, 2, 2, 2)))
        self.assertEqual(set(report.to_frame()['suite']), {'duality'})


@override_settings(PROPERTY_SAMPLES=4)
class VerifyCommandTest(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.out = Path(self.tmp.name)

    def verify(self, *args):
        stdout = StringIO()
        call_command('verify', *args, '--out', str(self.out), stdout=stdout)
        return stdout.getvalue()

    def test_all_suites_pass_on_defaults(self):
        output = self.verify('all')
        self.assertIn('checks passed', output)
        frame = read_csv(self.out / 'verify_all.csv')
        self.assertTrue(set(SUITES) <= set(frame['suite']))
        self.assertFalse((frame['status'] == 'fail').any())
        self.assertTrue((self.out / 'verify_all.txt').exists())

    def test_integer_calculus_is_exact(self):
        self.verify('calculus', '--scalar', 'integer')
        frame = read_csv(self.out / 'verify_calculus.csv')
        self.assertTrue(frame['exact'].all())
        self.assertTrue((frame['status'] == 'pass').all())

    def test_summary_reports_tolerance(self):
        output = self.verify('duality', '--tol-identity', '1e-9')
        self.assertIn('tolerance used: 1e-09', output)

    def test_sign_flip_exits_with_counterexample(self):
        with mock.patch.dict('cochains.calculus.STAR_SIGNS', {(1, 2, 3): 1}):
            with self.assertRaises(CommandError) as caught:
                self.verify('calculus')
        self.assertEqual(caught.exception.returncode, 1)
        path = self.out / 'counterexample_calculus.json'
        self.assertTrue(path.exists())
        self.assertEqual(json.loads(path.read_text())['degree'], 3)
        self.assertEqual(load_form(path).degree, 3)

    def test_bad_extents_exit_two(self):
        with self.assertRaises(CommandError) as caught:
            self.verify('calculus', '--extents', '3,3,3')
        self.assertEqual(caught.exception.returncode, 2)

    @override_settings(SPECTRAL_EXTENTS=(3, 3, 3, 3))
    def test_spectral_extents_flag_reaches_gauge_suite(self):
        output = self.verify('gauge', '--extents', '2,2,2,2', '--spectral-extents', '2,2,2,2')
        self.assertIn('Eigen-solution lattice: 2x2x2x2 periodic', output)
        frame = read_csv(self.out / 'verify_gauge.csv')
        basis = frame[frame['check'] == 'harmonic_basis_nonempty']
        self.assertIn('2x2x2x2 periodic', basis['note'].iloc[0])

    def test_bad_spectral_extents_exit_two(self):
        with self.assertRaises(CommandError) as caught:
            self.verify('duffin', '--spectral-extents', '2,2')
        self.assertEqual(caught.exception.returncode, 2)

    def test_unknown_suite_is_rejected(self):
        with self.assertRaises(CommandError):
            self.verify('everything')

    def test_output_is_deterministic(self):
        self.verify('duality')
        first = (self.out / 'verify_duality.csv').read_text().splitlines()[1:]
        self.verify('duality')
        second = (self.out / 'verify_duality.csv').read_text().splitlines()[1:]
        self.assertEqual(first, second)


class DomainDefaultsTest(SimpleTestCase):
    def test_config_domain(self):
        config = make_config('/tmp')
        self.assertEqual(config.domain, Domain((3, 3, 3, 3)))

    @override_settings(SPECTRAL_EXTENTS=(2, 2, 2, 2), SPECTRAL_BOUNDARY='periodic')
    def test_spectral_domain_falls_back_to_settings(self):
        self.assertEqual(make_config('/tmp').spectral_domain, Domain((2, 2, 2, 2), 'periodic'))

    def test_spectral_domain_from_config(self):
        config = make_config('/tmp', spectral_extents=(2, 3, 2, 2), spectral_boundary='zero')
        self.assertEqual(config.spectral_domain, Domain((2, 3, 2, 2)))


class ProjectSettingsTest(SimpleTestCase):
    def test_only_lattice_apps_are_installed(self):
        self.assertEqual(
            settings.INSTALLED_APPS,
            ['rest_framework', 'cochains', 'dirac_kahler', 'spectra', 'verification'],
        )

    def test_reports_are_stamped_in_utc(self):
        self.assertEqual(settings.TIME_ZONE, 'UTC')
