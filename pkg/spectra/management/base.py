from cochains.management.base import LatticeCommand, parse_mass


class SpectralCommand(LatticeCommand):
    """Commands that assemble an operator; defaults to the periodic lattice; assembled matrices carry their own dtype."""

    extents_setting = 'SPECTRAL_EXTENTS'
    boundary_setting = 'SPECTRAL_BOUNDARY'
    scalar_setting = None

    def add_command_arguments(self, parser):
        parser.add_argument('operator', help="Operator tag, e.g. dirac-, laplacian_0, coboundary_1, duffin_2")
        parser.add_argument('--degree', type=int)
        parser.add_argument('--mass')
        parser.add_argument('--mass2')

    def operator_options(self, options):
        return {
            'degree': options.get('degree'),
            'mass': parse_mass(options.get('mass')),
            'mass2': parse_mass(options.get('mass2')),
        }
