import pandas as pd

from cochains.reports import write_csv
from spectra.assembly import assemble
from spectra.linalg import eigenpairs
from spectra.management.base import SpectralCommand

SPECTRUM_COLUMNS = ['index', 're', 'im', 'residual']


class Command(SpectralCommand):
    help = 'Compute eigenpairs of an assembled operator and write them to CSV'

    def add_command_arguments(self, parser):
        super().add_command_arguments(parser)
        parser.add_argument('--count', type=int, help='Keep only the largest COUNT eigenvalues')
        parser.add_argument('--nonzero', action='store_true', help='Skip numerically zero eigenvalues')

    def run(self, config, **options):
        op = assemble(options['operator'], config.domain, **self.operator_options(options))
        pairs = eigenpairs(op, count=options.get('count'), tol=config.tol_eigen, nonzero=options['nonzero'])
        frame = pd.DataFrame(
            [{'index': n, 're': p.value.real, 'im': p.value.imag, 'residual': p.residual} for n, p in enumerate(pairs)],
            columns=SPECTRUM_COLUMNS,
        )
        self.stdout.write(f'{len(pairs)} eigenpairs of {op} (tolerance {config.tol_eigen:g})')
        self.written(write_csv(frame, config.output(f'{op.tag}_spectrum.csv')))
