from spectra.assembly import assemble
from spectra.export import export_index, export_matrix_market, index_path_for
from spectra.management.base import SpectralCommand


class Command(SpectralCommand):
    help = 'Assemble a lattice operator and export it as Matrix Market with a JSON basis index'

    def run(self, config, **options):
        op = assemble(options['operator'], config.domain, **self.operator_options(options))
        self.stdout.write(f'Assembled {op} on {config.domain}')
        destination = config.output(f'{op.tag}.mtx')
        self.written(export_matrix_market(op, destination))
        self.written(export_index(op, index_path_for(destination)))
