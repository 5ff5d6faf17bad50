import json

from cochains.reports import atomic_open
from spectra.assembly import assemble
from spectra.linalg import kernel
from spectra.management.base import SpectralCommand


def _vector_data(vector):
    return {'re': [float(x) for x in vector.real], 'im': [float(x) for x in vector.imag]}


class Command(SpectralCommand):
    help = 'Write an orthonormal basis of the numerical kernel of an operator as JSON'

    def run(self, config, **options):
        op = assemble(options['operator'], config.domain, **self.operator_options(options))
        vectors = kernel(op, tol=config.tol_kernel)
        if not vectors:
            self.stdout.write(self.style.WARNING(f'Kernel of {op.tag} is empty at tolerance {config.tol_kernel:g}'))

        payload = {
            'tag': op.tag,
            'extents': list(config.domain.extents),
            'boundary_mode': config.domain.boundary,
            'tolerance': config.tol_kernel,
            'dimension': len(vectors),
            'columns': op.cols.to_records(),
            'vectors': [_vector_data(v) for v in vectors],
        }
        path = config.output(f'{op.tag}_kernel.json')
        with atomic_open(path) as handle:
            json.dump(payload, handle)
            handle.write('\n')
        self.stdout.write(f'Kernel dimension {len(vectors)}')
        self.written(path)
