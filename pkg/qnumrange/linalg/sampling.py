from enum import Enum
from typing import Optional, Union

import numpy as np
from scipy import linalg as sla

from qnumrange.utils.exceptions import DimensionError, ValidationError


class SampleKind(str, Enum):
    UNIT_VECTOR = 'unit_vector'
    UNITARY = 'unitary'
    RANK_K = 'rank_k'
    DENSE = 'dense'


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def unit_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    x = complex_gaussian(rng, n)
    return x / np.linalg.norm(x)


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """QR of a complex Ginibre matrix with the diagonal of R made positive"""
    z = complex_gaussian(rng, (n, n))
    q, r = sla.qr(z)
    d = np.diag(r)
    ph = d / np.abs(d)
    return q * ph


def haar_unitaries(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of `count` Haar unitaries, shape (count, n, n)"""
    z = complex_gaussian(rng, (count, n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=1, axis2=2)
    ph = d / np.abs(d)
    return q * ph[:, None, :]


def orthogonal_unit_vector(x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Random unit vector orthogonal to the unit vector x"""
    for _ in range(8):
        w = complex_gaussian(rng, x.shape[0])
        w = w - np.vdot(x, w) * x
        norm = np.linalg.norm(w)
        if norm > 1e-8:
            w = w / norm
            # second pass keeps <x, w> at rounding level
            w = w - np.vdot(x, w) * x
            return w / np.linalg.norm(w)
    raise DimensionError("no vector orthogonal to x exists in dimension 1")


def sample(kind: Union[str, SampleKind], n: int, seed: int, k: Optional[int] = None) -> np.ndarray:
    """Deterministic random vectors and matrices for fixed (kind, n, seed, k)"""
    kind = SampleKind(kind)
    if n < 1:
        raise DimensionError(f"n must be at least 1, got {n}")
    rng = np.random.default_rng(seed)

    if kind is SampleKind.UNIT_VECTOR:
        return unit_vector(n, rng)
    if kind is SampleKind.UNITARY:
        return haar_unitary(n, rng)
    if kind is SampleKind.DENSE:
        return complex_gaussian(rng, (n, n))

    if k is None:
        raise ValidationError("rank_k sampling needs k")
    if not 0 <= k <= n:
        raise DimensionError(f"rank {k} is impossible in dimension {n}")
    left = complex_gaussian(rng, (n, k))
    right = complex_gaussian(rng, (n, k))
    return left @ right.conj().T
