"""
Explicit time-slice marching for the Dirac-Kahler equation.

Every one of the sixteen difference equations contains exactly one time
difference. Time-like equations (target containing axis 0) carry +D0+ of a
space-like family, so they determine that family on the next slice.
Space-like equations carry -D0- of a time-like family, so they determine it
on the current slice once the space-like values there are known.

Initial data lives on slice 1. One step t runs the time-like equations on
slice t (filling space-like slice t + 1) and then the space-like equations
on slice t + 1 (filling time-like slice t + 1).
"""
import logging

import numpy as np
import pandas as pd
from django.core.exceptions import ValidationError

from cochains.forms import DTYPES, SCALAR_REAL, InhomogeneousForm, random_inhomogeneous, scalar_of
from cochains.lattice import ALL_DIRECTION_SETS, TIME_AXIS, is_time_like

from .equations import dk_residual_components, klein_gordon_residual

logger = logging.getLogger(__name__)

RESIDUAL_COLUMNS = ['equation', 'dirs', 'k0', 'k1', 'k2', 'k3', 'residual']


def dirs_label(dirs):
    return '{' + ','.join(str(a) for a in dirs) + '}'


def _validate_initial(initial, steps):
    domain = initial.domain
    if steps < 1:
        raise ValidationError(f'The number of steps must be positive, got {steps}.')
    if domain.extents[TIME_AXIS] < steps + 1:
        raise ValidationError(
            f'Time extent {domain.extents[TIME_AXIS]} cannot hold {steps} steps; need at least {steps + 1}.'
        )
    mask = np.zeros(domain.storage_shape, dtype=bool)
    mask[domain.time_slice(1)] = True
    mask &= domain.interior_mask()
    for part in initial.parts:
        if np.any(part.coeffs[:, ~mask]):
            raise ValidationError(f'Initial data of degree {part.degree} is not confined to time slice 1.')


def march_scalar(initial, mass):
    """Scalar mode of the marched field: the data promoted by the mass, never narrowed."""
    mass_type = np.result_type(mass)
    if not np.iscomplexobj(mass) and float(mass).is_integer():
        mass_type = np.int64
    return scalar_of(np.result_type(DTYPES[initial.scalar], mass_type))


def _set_slice(field, dirs, t, values):
    domain = field.domain
    field.part(len(dirs)).component(dirs)[domain.time_slice(t)] = values


def cauchy_march(initial, mass, steps):
    """
    March Cauchy data on slice 1 forward by ``steps`` slices.

    Returns the spacetime field; all sixteen equations hold on slices
    2..steps and the time-like ones also on slice 1.
    """
    _validate_initial(initial, steps)
    domain = initial.domain
    scalar = march_scalar(initial, mass)
    field = InhomogeneousForm(p.astype(scalar) for p in initial.parts)

    for t in range(1, steps + 1):
        planes = dk_residual_components(field, mass)
        for target in ALL_DIRECTION_SETS:
            if is_time_like(target):
                source = tuple(a for a in target if a != TIME_AXIS)
                _set_slice(field, source, t + 1, -planes[target][domain.time_slice(t)])

        planes = dk_residual_components(field, mass)
        for target in ALL_DIRECTION_SETS:
            if not is_time_like(target):
                source = tuple(sorted(target + (TIME_AXIS,)))
                _set_slice(field, source, t + 1, planes[target][domain.time_slice(t + 1)])
        logger.debug(f'Marched slice {t + 1} of {domain}')

    logger.info(f'Marched {steps} steps on {domain} with m={mass}')
    return field


def window_slices(steps):
    """Time slices on which every equation of a marched field is enforced."""
    return range(2, steps + 1)


def _window_mask(domain, slices):
    mask = np.zeros(domain.storage_shape, dtype=bool)
    for t in slices:
        mask[domain.time_slice(t)] = True
    return mask & domain.interior_mask()


def window_residuals(field, mass, steps):
    """Max |residual| per equation over the enforced window."""
    mask = _window_mask(field.domain, window_slices(steps))
    planes = dk_residual_components(field, mass)
    return {dirs: float(np.max(np.abs(planes[dirs][mask]), initial=0.0)) for dirs in ALL_DIRECTION_SETS}


def window_klein_gordon(field, mass, steps):
    """Max |KG residual| over the enforced window."""
    mask = _window_mask(field.domain, window_slices(steps))
    kg = klein_gordon_residual(field, mass * mass)
    return max(float(np.max(np.abs(part.coeffs[:, mask]), initial=0.0)) for part in kg.parts)


def residual_frame(field, mass, steps=None):
    """
    One row per (equation, interior site) with the absolute residual.

    When ``steps`` is given only the enforced window is reported.
    """
    domain = field.domain
    mask = domain.interior_mask() if steps is None else _window_mask(domain, window_slices(steps))
    planes = dk_residual_components(field, mass)
    index = np.nonzero(mask)
    sites = np.column_stack(index) + 1 - domain.padding
    frames = []
    for number, dirs in enumerate(ALL_DIRECTION_SETS, start=1):
        frames.append(pd.DataFrame({
            'equation': number,
            'dirs': dirs_label(dirs),
            'k0': sites[:, 0],
            'k1': sites[:, 1],
            'k2': sites[:, 2],
            'k3': sites[:, 3],
            'residual': np.abs(planes[dirs][index]),
        }))
    return pd.concat(frames, ignore_index=True)[RESIDUAL_COLUMNS]


def random_cauchy_data(domain, seed, values=SCALAR_REAL):
    """Seeded random field supported on interior sites of time slice 1."""
    field = random_inhomogeneous(domain, seed, values)
    mask = np.zeros(domain.storage_shape, dtype=bool)
    mask[domain.time_slice(1)] = True
    for part in field.parts:
        part.coeffs[:, ~mask] = 0
    return field
