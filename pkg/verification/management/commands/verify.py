from dataclasses import replace

from django.core.management.base import CommandError

from cochains.lattice import BOUNDARY_CHOICES
from cochains.management.base import EXIT_FAILURE, LatticeCommand, parse_extents
from cochains.reports import atomic_open
from cochains.serializers import dump_form
from verification.suites import SUITE_CHOICES, run_suites


class Command(LatticeCommand):
    help = (
        'Run property suites over the lattice operators and write a CSV report. '
        '--extents/--boundary set the lattice of the random-form sweeps; eigen-solution '
        'and harmonic checks of the duffin and gauge suites run on --spectral-extents/'
        '--spectral-boundary, and the dirac suite marches on MARCH_EXTENTS.'
    )

    def add_command_arguments(self, parser):
        parser.add_argument('suite', choices=SUITE_CHOICES)
        parser.add_argument('--spectral-extents', help='Lattice for eigen-solutions, N0,N1,N2,N3 (default SPECTRAL_EXTENTS)')
        parser.add_argument('--spectral-boundary', choices=[c for c, _ in BOUNDARY_CHOICES])

    def config(self, options):
        config = super().config(options)
        spectral_extents = options.get('spectral_extents')
        return replace(
            config,
            spectral_extents=parse_extents(spectral_extents) if spectral_extents else None,
            spectral_boundary=options.get('spectral_boundary'),
        )

    def run(self, config, **options):
        suite = options['suite']
        self.stdout.write(f'Verifying {suite} on {config.describe()}')
        self.stdout.write(f'Eigen-solution lattice: {config.spectral_domain}')
        report = run_suites(suite, config)

        self.written(report.write_csv(config.output(f'verify_{suite}.csv')))
        lines = list(report.summary_lines())
        with atomic_open(config.output(f'verify_{suite}.txt')) as handle:
            handle.write('\n'.join(lines) + '\n')
        for line in lines:
            self.stdout.write(line)

        if report.passed:
            self.stdout.write(self.style.SUCCESS(f'All {len(report.checks)} checks passed'))
            return

        self.stdout.write(self.style.ERROR(f'{len(report.failures)} of {len(report.checks)} checks failed'))
        failing = report.first_counterexample()
        if failing is not None:
            path = dump_form(failing.counterexample, config.output(f'counterexample_{suite}.json'))
            self.stdout.write(self.style.ERROR(f'Counterexample for {failing.name} written to {path}'))
        raise CommandError(f'verify {suite}: {report.failures[0].name} failed', returncode=EXIT_FAILURE)
