from pathlib import Path

from django.core.management.base import CommandError

from cochains.forms import InhomogeneousForm
from cochains.management.base import EXIT_USAGE, LatticeCommand, parse_mass
from cochains.reports import write_csv
from cochains.serializers import dump_form, load_form
from dirac_kahler.marching import (
    cauchy_march, random_cauchy_data, residual_frame, window_klein_gordon, window_residuals,
)


class Command(LatticeCommand):
    help = 'March Cauchy data forward in time and report the interior residuals'

    extents_setting = 'MARCH_EXTENTS'

    def add_command_arguments(self, parser):
        parser.add_argument('--input', help='Initial data file; seeded random data when omitted')
        parser.add_argument('--mass', required=True)
        parser.add_argument('--steps', type=int, default=4)

    def run(self, config, **options):
        mass = parse_mass(options['mass'])
        steps = options['steps']
        if options.get('input'):
            initial = load_form(Path(options['input']))
            if not isinstance(initial, InhomogeneousForm):
                raise CommandError('march needs an inhomogeneous form file (degree null).', returncode=EXIT_USAGE)
        else:
            initial = random_cauchy_data(config.domain, config.seed, values=config.scalar)
            self.stdout.write(f'Random Cauchy data on {config.domain} (seed {config.seed})')

        field = cauchy_march(initial, mass, steps)
        self.written(dump_form(field, config.output('marched_field.json')))
        self.written(write_csv(residual_frame(field, mass, steps), config.output('march_residuals.csv')))

        worst = max(window_residuals(field, mass, steps).values())
        scale = max(field.max_abs(), 1.0)
        self.stdout.write(f'Max residual over slices 2..{steps}: {worst:.3e} (scale {scale:.3e})')
        self.stdout.write(f'Max Klein-Gordon residual: {window_klein_gordon(field, mass, steps):.3e}')
        if worst > config.tol_identity * scale:
            self.stdout.write(self.style.WARNING(f'Residual exceeds tolerance {config.tol_identity:g}'))
