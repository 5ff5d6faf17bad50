"""Integer chains of the complex C(4), the boundary operator and the chain-cochain pairing."""
import logging

from django.core.exceptions import ValidationError

from .lattice import direction_set, position

logger = logging.getLogger(__name__)


class Chain:
    """Finite integer combination of basis chains labelled (dirs, k)."""

    def __init__(self, degree, coeffs=None):
        if degree not in range(5):
            raise ValidationError(f'Degree must be 0..4, got {degree}.')
        self.degree = degree
        self.coeffs = {}
        for (dirs, k), value in (coeffs or {}).items():
            self._accumulate(direction_set(dirs), tuple(k), value)

    @classmethod
    def basis(cls, dirs, k):
        dirs = direction_set(dirs)
        return cls(len(dirs), {(dirs, tuple(k)): 1})

    def _accumulate(self, dirs, k, value):
        if len(dirs) != self.degree:
            raise ValidationError(f'Label {dirs} does not belong to a degree {self.degree} chain.')
        total = self.coeffs.get((dirs, k), 0) + int(value)
        if total:
            self.coeffs[(dirs, k)] = total
        else:
            self.coeffs.pop((dirs, k), None)

    def is_zero(self):
        return not self.coeffs

    def __add__(self, other):
        if other.degree != self.degree:
            raise ValidationError(f'Degree mismatch: {self.degree} vs {other.degree}.')
        out = Chain(self.degree, self.coeffs)
        for label, value in other.coeffs.items():
            out._accumulate(*label, value)
        return out

    def __sub__(self, other):
        return self + (-1) * other

    def __mul__(self, scalar):
        return Chain(self.degree, {label: int(scalar) * v for label, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Chain):
            return NotImplemented
        return self.degree == other.degree and self.coeffs == other.coeffs

    __hash__ = None

    def __repr__(self):
        return f'<Chain degree={self.degree} terms={len(self.coeffs)}>'


def boundary(chain):
    """
    Boundary of a chain.

    On a basis chain (J, k) each axis a in J contributes
    (-1)^pos(a, J) [(J minus a, tau_a k) - (J minus a, k)];
    vertices have zero boundary.
    """
    if chain.degree == 0:
        return Chain(0)
    out = Chain(chain.degree - 1)
    for (dirs, k), value in chain.coeffs.items():
        for a in dirs:
            face = tuple(b for b in dirs if b != a)
            sign = -1 if position(a, dirs) % 2 else 1
            shifted = list(k)
            shifted[a] += 1
            out._accumulate(face, tuple(shifted), sign * value)
            out._accumulate(face, k, -sign * value)
    return out


def pair(chain, form):
    """Sum of chain coefficient times form coefficient over matching labels."""
    if chain.degree != form.degree:
        return 0
    return sum(value * form[dirs, k] for (dirs, k), value in chain.coeffs.items())


def domain_chain(domain):
    """The 4-chain V with unit coefficient on every interior site."""
    return Chain(4, {((0, 1, 2, 3), k): 1 for k in domain.enumerate_sites()})
