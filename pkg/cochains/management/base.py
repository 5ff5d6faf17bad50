"""
Shared plumbing for the lattice management commands.

Every command parses the same run-configuration flags, resolves them
against the settings defaults and maps domain errors onto exit codes:
0 pass, 1 property failure, 2 usage or guard error.
"""
from dataclasses import dataclass
import logging
from pathlib import Path

from django.conf import settings
from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError
from django.test.utils import override_settings
from rest_framework import serializers

from cochains.forms import SCALAR_CHOICES
from cochains.lattice import BOUNDARY_CHOICES, Domain
from spectra.linalg import SpectralError

logger = logging.getLogger(__name__)

EXIT_FAILURE = 1
EXIT_USAGE = 2


def parse_extents(value):
    if isinstance(value, str):
        try:
            value = [int(n) for n in value.split(',')]
        except ValueError:
            raise CommandError(f'Extents must look like N0,N1,N2,N3, got "{value}".', returncode=EXIT_USAGE)
    value = tuple(value)
    if len(value) != 4:
        raise CommandError(f'Extents need four values, got {len(value)}.', returncode=EXIT_USAGE)
    return value


def parse_mass(value):
    """Accept real or complex literals such as 2, -0.5 or 1+2j."""
    if value is None or isinstance(value, (int, float, complex)):
        return value
    try:
        number = complex(value.replace(' ', ''))
    except ValueError:
        raise CommandError(f'Cannot read mass "{value}".', returncode=EXIT_USAGE)
    return number.real if number.imag == 0 else number


@dataclass(frozen=True)
class RunConfig:
    extents: tuple
    boundary: str
    scalar: str | None
    seed: int
    tol_identity: float
    tol_eigen: float
    tol_kernel: float
    output_dir: Path
    spectral_extents: tuple | None = None
    spectral_boundary: str | None = None

    @property
    def domain(self):
        return Domain(self.extents, self.boundary)

    @property
    def spectral_domain(self):
        """Lattice for eigen-solutions and harmonic forms; falls back to the SPECTRAL_* settings."""
        return Domain(
            self.spectral_extents or settings.SPECTRAL_EXTENTS,
            self.spectral_boundary or settings.SPECTRAL_BOUNDARY,
        )

    def output(self, name):
        return self.output_dir / name

    def settings_overrides(self):
        return {
            'TOL_IDENTITY': self.tol_identity,
            'TOL_EIGEN': self.tol_eigen,
            'TOL_KERNEL': self.tol_kernel,
        }

    def describe(self):
        return (
            f'{self.domain} scalar={self.scalar or "from input"} seed={self.seed} '
            f'tol_identity={self.tol_identity:g} tol_eigen={self.tol_eigen:g} tol_kernel={self.tol_kernel:g}'
        )


class LatticeCommand(BaseCommand):
    """
    Base class: subclasses implement ``run(config, **options)``.

    Commands whose scalar mode comes from an input file or from the operator
    itself set ``scalar_setting = None`` and take no ``--scalar`` flag.
    """

    extents_setting = 'LATTICE_EXTENTS'
    boundary_setting = 'LATTICE_BOUNDARY'
    scalar_setting = 'LATTICE_SCALAR'

    def add_arguments(self, parser):
        parser.add_argument('--extents', help='Lattice extents N0,N1,N2,N3')
        parser.add_argument('--boundary', choices=[c for c, _ in BOUNDARY_CHOICES])
        if self.scalar_setting:
            parser.add_argument('--scalar', choices=[c for c, _ in SCALAR_CHOICES])
        parser.add_argument('--seed', type=int)
        parser.add_argument('--tol-identity', type=float)
        parser.add_argument('--tol-eigen', type=float)
        parser.add_argument('--tol-kernel', type=float)
        parser.add_argument('--out', help='Output directory')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def config(self, options):
        def pick(name, default):
            value = options.get(name)
            return default if value is None else value

        return RunConfig(
            extents=parse_extents(pick('extents', getattr(settings, self.extents_setting))),
            boundary=pick('boundary', getattr(settings, self.boundary_setting)),
            scalar=pick('scalar', getattr(settings, self.scalar_setting)) if self.scalar_setting else None,
            seed=int(pick('seed', settings.LATTICE_SEED)),
            tol_identity=float(pick('tol_identity', settings.TOL_IDENTITY)),
            tol_eigen=float(pick('tol_eigen', settings.TOL_EIGEN)),
            tol_kernel=float(pick('tol_kernel', settings.TOL_KERNEL)),
            output_dir=Path(pick('out', settings.LATTICE_OUTPUT_DIR)),
        )

    def handle(self, *args, **options):
        try:
            config = self.config(options)
            config.domain
        except ValidationError as e:
            raise CommandError('; '.join(e.messages), returncode=EXIT_USAGE)
        logger.info(f'{self.__module__.rsplit(".", 1)[-1]}: {config.describe()}')

        try:
            with override_settings(**config.settings_overrides()):
                self.run(config, **options)
        except ValidationError as e:
            raise CommandError('; '.join(e.messages), returncode=EXIT_USAGE)
        except serializers.ValidationError as e:
            raise CommandError(f'Invalid form file: {e.detail}', returncode=EXIT_USAGE)
        except SpectralError as e:
            raise CommandError(str(e), returncode=EXIT_USAGE)
        except OSError as e:
            raise CommandError(f'File error: {e}', returncode=EXIT_USAGE)

    def run(self, config, **options):
        raise NotImplementedError

    def written(self, path, what='Wrote'):
        self.stdout.write(self.style.SUCCESS(f'{what} {path}'))
