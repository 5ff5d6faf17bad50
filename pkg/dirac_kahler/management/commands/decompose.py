from pathlib import Path

import pandas as pd
from django.core.management.base import CommandError

from cochains.forms import InhomogeneousForm, norm
from cochains.management.base import EXIT_USAGE, LatticeCommand, parse_mass
from cochains.reports import write_csv
from cochains.serializers import dump_form, load_form
from dirac_kahler.equations import duffin_decompose, duffin_residual

RESIDUAL_COLUMNS = ['pair', 'low_degree', 'norm', 'residual_low', 'residual_high', 'residual']


class Command(LatticeCommand):
    help = 'Split an inhomogeneous form into its four Duffin pairs and report their residuals'
    scalar_setting = None

    def add_command_arguments(self, parser):
        parser.add_argument('input', help='Inhomogeneous form file')
        parser.add_argument('--mass', required=True, help='Mass m (real or complex, nonzero)')

    def run(self, config, **options):
        mass = parse_mass(options['mass'])
        if mass == 0:
            raise CommandError('Cannot decompose with m = 0 (division by mass).', returncode=EXIT_USAGE)

        field = load_form(Path(options['input']))
        if not isinstance(field, InhomogeneousForm):
            raise CommandError('decompose needs an inhomogeneous form file (degree null).', returncode=EXIT_USAGE)

        rows = []
        for pair in duffin_decompose(field, mass):
            residual = duffin_residual(pair, mass)
            low, high = norm(residual.low), norm(residual.high)
            rows.append({
                'pair': pair.label,
                'low_degree': pair.degree,
                'norm': pair.norm(),
                'residual_low': low,
                'residual_high': high,
                'residual': max(low, high),
            })
            self.written(dump_form(pair.as_field(), config.output(f'pair_{pair.label}.json')))

        frame = pd.DataFrame(rows, columns=RESIDUAL_COLUMNS)
        self.written(write_csv(frame, config.output('duffin_residuals.csv')))
        self.stdout.write(f'Largest Duffin residual: {frame["residual"].max():.3e}')
