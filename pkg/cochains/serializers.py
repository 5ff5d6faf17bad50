"""JSON interchange for Form and InhomogeneousForm files."""
import json
import logging

from rest_framework import serializers

from .forms import SCALAR_CHOICES, SCALAR_COMPLEX, SCALAR_INTEGER, Form, InhomogeneousForm
from .lattice import BOUNDARY_CHOICES, Domain, component_index
from .reports import atomic_open

logger = logging.getLogger(__name__)


class FormEntrySerializer(serializers.Serializer):
    dirs = serializers.ListField(
        child=serializers.IntegerField(min_value=0, max_value=3),
        max_length=4,
        allow_empty=True,
    )
    k = serializers.ListField(child=serializers.IntegerField(), min_length=4, max_length=4)
    re = serializers.FloatField()
    im = serializers.FloatField(required=False, default=0.0)

    def validate_dirs(self, value):
        if any(b <= a for a, b in zip(value, value[1:])):
            raise serializers.ValidationError('Direction sets must be strictly increasing.')
        return value


class FormSerializer(serializers.Serializer):
    """A null degree marks an inhomogeneous form."""

    degree = serializers.IntegerField(min_value=0, max_value=4, allow_null=True)
    extents = serializers.ListField(child=serializers.IntegerField(min_value=1), min_length=4, max_length=4)
    boundary_mode = serializers.ChoiceField(choices=BOUNDARY_CHOICES)
    scalar = serializers.ChoiceField(choices=SCALAR_CHOICES)
    entries = FormEntrySerializer(many=True)

    def validate(self, data):
        domain = Domain(tuple(data['extents']), data['boundary_mode'])
        errors = []
        for n, entry in enumerate(data['entries']):
            if data['degree'] is not None and len(entry['dirs']) != data['degree']:
                errors.append(f'entry {n}: direction set {entry["dirs"]} does not have degree {data["degree"]}')
            if not domain.in_storage(entry['k']):
                errors.append(f'entry {n}: site {entry["k"]} lies outside the padded range')
            if data['scalar'] != SCALAR_COMPLEX and entry['im']:
                errors.append(f'entry {n}: imaginary part given for {data["scalar"]} scalars')
            if data['scalar'] == SCALAR_INTEGER and not float(entry['re']).is_integer():
                errors.append(f'entry {n}: {entry["re"]} is not an integer')
        if errors:
            raise serializers.ValidationError({'entries': errors})
        data['domain'] = domain
        return data

    def build(self):
        """Form or InhomogeneousForm described by the validated data."""
        data = self.validated_data
        domain, scalar = data['domain'], data['scalar']
        if data['degree'] is None:
            field = InhomogeneousForm.zeros(domain, scalar=scalar)
            parts = {r: field.part(r) for r in range(5)}
        else:
            parts = {data['degree']: Form.zeros(data['degree'], domain, scalar=scalar)}
        for entry in data['entries']:
            dirs = tuple(entry['dirs'])
            if scalar == SCALAR_COMPLEX:
                value = complex(entry['re'], entry['im'])
            elif scalar == SCALAR_INTEGER:
                value = int(entry['re'])
            else:
                value = entry['re']
            index = (component_index(dirs),) + domain.storage_index(entry['k'])
            parts[len(dirs)].coeffs[index] += value
        if data['degree'] is None:
            return InhomogeneousForm(parts[r] for r in range(5))
        return parts[data['degree']]


def _entry(dirs, k, value, scalar):
    if scalar == SCALAR_COMPLEX:
        return {'dirs': list(dirs), 'k': list(k), 're': float(value.real), 'im': float(value.imag)}
    if scalar == SCALAR_INTEGER:
        return {'dirs': list(dirs), 'k': list(k), 're': int(value)}
    return {'dirs': list(dirs), 'k': list(k), 're': float(value)}


def form_to_data(form):
    if isinstance(form, InhomogeneousForm):
        degree, forms = None, form.parts
    else:
        degree, forms = form.degree, (form,)
    scalar = form.scalar
    domain = forms[0].domain
    return {
        'degree': degree,
        'extents': list(domain.extents),
        'boundary_mode': domain.boundary,
        'scalar': scalar,
        'entries': [_entry(dirs, k, value, scalar) for part in forms for dirs, k, value in part.entries()],
    }


def load_form(path):
    """Read a form file; raises serializers.ValidationError on malformed content."""
    with open(path) as handle:
        try:
            payload = json.load(handle)
        except json.JSONDecodeError as e:
            raise serializers.ValidationError({'file': f'{path} is not valid JSON: {e}'})
    serializer = FormSerializer(data=payload)
    serializer.is_valid(raise_exception=True)
    logger.debug(f'Loaded {len(serializer.validated_data["entries"])} entries from {path}')
    return serializer.build()


def dump_form(form, path):
    data = form_to_data(form)
    with atomic_open(path) as handle:
        json.dump(data, handle, indent=2)
        handle.write('\n')
    logger.info(f'Wrote form file {path} ({len(data["entries"])} entries)')
    return path

