"""Dense kernel and eigen computations on assembled operators."""
from dataclasses import dataclass
import logging

import numpy as np
import scipy.linalg
from django.conf import settings

logger = logging.getLogger(__name__)


class SpectralError(Exception):
    """Base class for linear-algebra failures."""


class SizeGuardError(SpectralError):
    """The matrix is too wide for a dense factorization."""


class ConvergenceError(SpectralError):
    """LAPACK did not converge."""


def dense(op, limit=None):
    limit = limit or settings.DENSE_COLUMN_LIMIT
    if op.shape[1] > limit:
        raise SizeGuardError(f'{op.tag} has {op.shape[1]} columns; the dense limit is {limit}.')
    return op.to_dense()


def kernel(op, tol=None, limit=None):
    """
    Orthonormal basis of the numerical null space.

    Singular directions whose singular value is at most ``tol`` times the
    largest one are kept. Returns a list of 1-D vectors (possibly empty).
    """
    tol = tol if tol is not None else settings.TOL_KERNEL
    matrix = dense(op, limit)
    try:
        basis = scipy.linalg.null_space(matrix, rcond=tol)
    except np.linalg.LinAlgError as e:
        raise ConvergenceError(f'SVD of {op.tag} did not converge: {e}') from e
    vectors = [basis[:, n] for n in range(basis.shape[1])]
    if not vectors:
        logger.warning(f'Kernel of {op.tag} is empty at tolerance {tol:g}')
    else:
        logger.info(f'Kernel of {op.tag} has dimension {len(vectors)}')
    return vectors


@dataclass(frozen=True, eq=False)
class Eigenpair:
    value: complex
    vector: np.ndarray
    residual: float


def eigenpairs(op, count=None, tol=None, limit=None, nonzero=False):
    """
    Eigenpairs with ||A v - lambda v|| <= tol * ||A||_F * ||v||.

    Vectors are normalised to unit length. Pairs are ordered by decreasing
    modulus, ties broken by real then imaginary part; failing pairs are
    dropped with a warning.
    """
    tol = tol if tol is not None else settings.TOL_EIGEN
    if op.shape[0] != op.shape[1]:
        raise SpectralError(f'{op.tag} is not square: {op.shape}.')
    matrix = dense(op, limit)
    try:
        values, vectors = scipy.linalg.eig(matrix)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise ConvergenceError(f'Eigen-decomposition of {op.tag} did not converge: {e}') from e

    scale = float(np.linalg.norm(matrix))
    pairs, dropped = [], 0
    for n in range(len(values)):
        value, vector = values[n], vectors[:, n]
        vector = vector / np.linalg.norm(vector)
        residual = float(np.linalg.norm(matrix @ vector - value * vector))
        if residual > tol * max(scale, 1.0):
            dropped += 1
            continue
        if nonzero and abs(value) <= tol * max(scale, 1.0):
            continue
        pairs.append(Eigenpair(complex(value), vector, residual))
    if dropped:
        logger.warning(f'Discarded {dropped} eigenpairs of {op.tag} above the residual bound')

    pairs.sort(key=lambda p: (-round(abs(p.value), 10), -round(p.value.real, 10), -round(p.value.imag, 10)))
    return pairs[:count] if count is not None else pairs
