from pathlib import Path

from cochains.calculus import OPERATION_CHOICES, apply_named
from cochains.management.base import LatticeCommand
from cochains.serializers import dump_form, load_form


class Command(LatticeCommand):
    help = 'Apply a lattice operator to a form file and write the result as a form file'
    scalar_setting = None

    def add_command_arguments(self, parser):
        parser.add_argument('operation', choices=OPERATION_CHOICES)
        parser.add_argument('input', help='Form file (JSON interchange format)')
        parser.add_argument('--output', help='Output file name inside --out')

    def run(self, config, **options):
        source = Path(options['input'])
        form = load_form(source)
        self.stdout.write(f'Applying {options["operation"]} to {form}')

        result = apply_named(options['operation'], form)
        if getattr(result, 'top', False):
            self.stdout.write(self.style.WARNING(
                'Coboundary of a top degree form: the result is the zero 4-form'
            ))
        if getattr(result, 'truncated', False):
            self.stdout.write(self.style.WARNING('Support left the padded storage; the result is truncated'))

        name = options.get('output') or f'{options["operation"]}_{source.stem}.json'
        self.written(dump_form(result, config.output(name)))
