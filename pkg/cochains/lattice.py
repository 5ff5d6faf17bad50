"""
Lattice geometry shared by every other module.

Sites are addressed by multi-indices k = (k0, k1, k2, k3) with k0 the time
index. Interior sites run over 1..N_i on every axis. Zero-padded domains keep
one ghost layer on each side of every axis (storage index == k); periodic
domains store exactly N_i sites per axis (storage index == k - 1) and wrap.
"""
from dataclasses import dataclass
from itertools import combinations, product
import logging

import numpy as np
from django.core.exceptions import ValidationError

logger = logging.getLogger(__name__)

AXES = (0, 1, 2, 3)
TIME_AXIS = 0

BOUNDARY_ZERO = 'zero'
BOUNDARY_PERIODIC = 'periodic'
BOUNDARY_CHOICES = [
    (BOUNDARY_ZERO, 'Zero padded'),
    (BOUNDARY_PERIODIC, 'Periodic'),
]

FORWARD = 'forward'
BACKWARD = 'backward'
DIRECTION_CHOICES = [
    (FORWARD, 'Forward (tau)'),
    (BACKWARD, 'Backward (sigma)'),
]

# Canonical (lexicographic) enumeration of direction sets per degree.
DIRECTION_SETS = {r: tuple(combinations(AXES, r)) for r in range(5)}
ALL_DIRECTION_SETS = tuple(dirs for r in range(5) for dirs in DIRECTION_SETS[r])


def direction_set(dirs):
    """Validate and normalise a direction set to a sorted tuple."""
    dirs = tuple(int(a) for a in dirs)
    if any(a not in AXES for a in dirs):
        raise ValidationError(f'Direction set {dirs} has axes outside 0..3.')
    if any(b <= a for a, b in zip(dirs, dirs[1:])):
        raise ValidationError(f'Direction set {dirs} must be strictly increasing.')
    return dirs


def complement(dirs):
    return tuple(a for a in AXES if a not in dirs)


def position(axis, dirs):
    """Number of elements of ``dirs`` smaller than ``axis``."""
    return sum(1 for b in dirs if b < axis)


def component_index(dirs):
    return DIRECTION_SETS[len(dirs)].index(tuple(dirs))


def is_time_like(dirs):
    return TIME_AXIS in dirs


@dataclass(frozen=True)
class Domain:
    extents: tuple
    boundary: str = BOUNDARY_ZERO

    def __post_init__(self):
        extents = tuple(int(n) for n in self.extents)
        if len(extents) != 4:
            raise ValidationError(f'A domain needs four extents, got {len(extents)}.')
        if any(n < 1 for n in extents):
            raise ValidationError(f'Extents must be positive, got {extents}.')
        if self.boundary not in dict(BOUNDARY_CHOICES):
            raise ValidationError(f'Unknown boundary mode "{self.boundary}".')
        object.__setattr__(self, 'extents', extents)

    def __str__(self):
        return f"{'x'.join(str(n) for n in self.extents)} {self.boundary}"

    @property
    def is_periodic(self):
        return self.boundary == BOUNDARY_PERIODIC

    @property
    def padding(self):
        return 0 if self.is_periodic else 1

    @property
    def storage_shape(self):
        return tuple(n + 2 * self.padding for n in self.extents)

    @property
    def interior_shape(self):
        return self.extents

    @property
    def site_count(self):
        return int(np.prod(self.extents))

    @property
    def interior(self):
        """Slices selecting the interior sites out of a storage array."""
        pad = self.padding
        return tuple(slice(pad, pad + n) for n in self.extents)

    def contains(self, k):
        return all(1 <= k[i] <= self.extents[i] for i in AXES)

    def in_storage(self, k):
        if self.is_periodic:
            return True
        return all(0 <= k[i] <= self.extents[i] + 1 for i in AXES)

    def storage_index(self, k):
        if self.is_periodic:
            return tuple((k[i] - 1) % self.extents[i] for i in AXES)
        if not self.in_storage(k):
            raise ValidationError(f'Site {tuple(k)} lies outside the padded range of {self}.')
        return tuple(int(v) for v in k)

    def site_of(self, index):
        return tuple(int(v) + 1 - self.padding for v in index)

    def shift(self, k, axis, direction=FORWARD):
        """tau_i k (forward) or sigma_i k (backward)."""
        if axis not in AXES:
            raise ValidationError(f'Axis {axis} is not one of 0..3.')
        step = 1 if direction == FORWARD else -1
        k = list(k)
        k[axis] += step
        if self.is_periodic:
            n = self.extents[axis]
            k[axis] = (k[axis] - 1) % n + 1
        return tuple(k)

    def enumerate_sites(self, padded=False):
        """Row-major sites: k0 varies slowest, k3 fastest."""
        if padded and not self.is_periodic:
            ranges = [range(0, n + 2) for n in self.extents]
        else:
            ranges = [range(1, n + 1) for n in self.extents]
        return list(product(*ranges))

    def translate(self, array, axis, step):
        """
        Return b with b[k] = array[k + step] along a lattice axis.

        The last four dimensions of ``array`` are the site axes. Periodic
        domains wrap; zero-padded domains fill with zeros.
        """
        ax = array.ndim - 4 + axis
        if step == 0:
            return array.copy()
        if self.is_periodic:
            return np.roll(array, -step, axis=ax)
        out = np.zeros_like(array)
        length = array.shape[ax]
        if abs(step) >= length:
            return out
        src = [slice(None)] * array.ndim
        dst = [slice(None)] * array.ndim
        if step > 0:
            src[ax] = slice(step, None)
            dst[ax] = slice(None, length - step)
        else:
            src[ax] = slice(None, length + step)
            dst[ax] = slice(-step, None)
        out[tuple(dst)] = array[tuple(src)]
        return out

    def clear_ghosts(self, array, keep_upper=False):
        """Zero every ghost site; optionally keep the upper ghost layer."""
        if self.is_periodic:
            return array
        out = np.zeros_like(array)
        lead = (slice(None),) * (array.ndim - 4)
        if keep_upper:
            region = tuple(slice(1, None) for _ in AXES)
        else:
            region = self.interior
        out[lead + region] = array[lead + region]
        return out

    def interior_mask(self):
        mask = np.zeros(self.storage_shape, dtype=bool)
        mask[self.interior] = True
        return mask

    def time_slice(self, t):
        """Storage slice of time slice k0 = t."""
        index = t - 1 + self.padding
        return (slice(index, index + 1),) + (slice(None),) * 3
