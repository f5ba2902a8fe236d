from enum import Enum
from typing import Sequence, Union

import numpy as np
from scipy import linalg as sla

from qnumrange.linalg.types import ComplexMatrix, DaggerMode, as_matrix, as_vector
from qnumrange.utils.exceptions import DimensionError, ValidationError

GRAM_TOL = 1e-8


class SchattenOrder(str, Enum):
    TRACE = 'trace'
    HILBERT_SCHMIDT = 'hilbert_schmidt'
    OPERATOR = 'operator'


def inner(x: np.ndarray, y: np.ndarray) -> complex:
    """<x, y> = y* x, linear in the first argument"""
    return complex(np.vdot(y, x))


def dyad(x: np.ndarray, y: np.ndarray) -> ComplexMatrix:
    """x (x) y*, the rank-one map z -> <z, y> x"""
    return np.outer(x, np.conj(y))


def matrix_unit(n: int, i: int, j: int) -> ComplexMatrix:
    """E_ij with 0-based indices"""
    if not (0 <= i < n and 0 <= j < n):
        raise DimensionError(f"E_({i},{j}) does not exist in dimension {n}")
    e = np.zeros((n, n), dtype=np.complex128)
    e[i, j] = 1.0
    return e


def trace(A: ComplexMatrix) -> complex:
    A = as_matrix(A, "A")
    return complex(np.trace(A))


def pairing(C: ComplexMatrix, T: ComplexMatrix) -> complex:
    """<C, T> = tr(C T)"""
    C = as_matrix(C, "C")
    T = as_matrix(T, "T")
    if C.shape != T.shape:
        raise DimensionError(f"pairing needs equal sizes, got {C.shape} and {T.shape}")
    # tr(CT) without forming the product
    return complex(np.sum(C * T.T))


def singular_values(A: ComplexMatrix) -> np.ndarray:
    return sla.svdvals(as_matrix(A, "A", square=False))


def schatten_norm(A: ComplexMatrix, order: Union[str, SchattenOrder] = SchattenOrder.HILBERT_SCHMIDT) -> float:
    order = SchattenOrder(order)
    s = singular_values(A)
    if order is SchattenOrder.TRACE:
        return float(np.sum(s))
    if order is SchattenOrder.HILBERT_SCHMIDT:
        return float(np.sqrt(np.sum(s * s)))
    return float(s[0]) if s.size else 0.0


def hs_norm(A: ComplexMatrix) -> float:
    """Frobenius norm without an SVD, for residuals"""
    return float(np.linalg.norm(A))


def numerical_rank(A: ComplexMatrix, tol: float = 1e-9) -> int:
    """Singular values above tol * sigma_max; the zero matrix has rank 0"""
    if tol <= 0:
        raise ValidationError(f"rank tolerance must be positive, got {tol}")
    s = singular_values(A)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def dagger(A: ComplexMatrix, mode: Union[str, DaggerMode]) -> ComplexMatrix:
    A = as_matrix(A, "A")
    mode = DaggerMode(mode)
    if mode is DaggerMode.IDENTITY:
        return A.copy()
    if mode is DaggerMode.TRANSPOSE:
        return A.T.copy()
    if mode is DaggerMode.CONJUGATE:
        return np.conj(A)
    return np.conj(A.T)


def gram_defect(vectors: Sequence[np.ndarray]) -> float:
    V = np.column_stack([as_vector(v, "vector") for v in vectors])
    gram = V.conj().T @ V
    return float(np.max(np.abs(gram - np.eye(V.shape[1]))))


def extend_to_unitary(vectors: Sequence[np.ndarray]) -> ComplexMatrix:
    """
    Complete k orthonormal vectors to a unitary U with U e_i = v_i

    The completion runs Gram-Schmidt (twice) over the standard basis, always
    taking the basis vector with the largest remaining component, so the
    output is deterministic and standard-basis inputs complete to I.
    """
    if len(vectors) == 0:
        raise ValidationError("extend_to_unitary needs at least one vector")
    cols = [as_vector(v, "vector") for v in vectors]
    n = cols[0].shape[0]
    if any(c.shape[0] != n for c in cols):
        raise DimensionError("vectors must share one length")
    if len(cols) > n:
        raise DimensionError(f"{len(cols)} vectors cannot be orthonormal in dimension {n}")

    defect = gram_defect(cols)
    if defect > GRAM_TOL:
        raise ValidationError(f"vectors are not orthonormal (worst Gram defect {defect:.3e})")

    basis = np.column_stack(cols)
    identity = np.eye(n, dtype=np.complex128)
    while basis.shape[1] < n:
        residual = identity - basis @ (basis.conj().T @ identity)
        residual = residual - basis @ (basis.conj().T @ residual)
        norms = np.linalg.norm(residual, axis=0)
        j = int(np.argmax(norms))
        candidate = residual[:, j] / norms[j]
        candidate = candidate - basis @ (basis.conj().T @ candidate)
        candidate = candidate / np.linalg.norm(candidate)
        basis = np.column_stack([basis, candidate])

    return basis


def is_unitary(U: ComplexMatrix, tol: float = 1e-10) -> bool:
    U = as_matrix(U, "U")
    return hs_norm(U.conj().T @ U - np.eye(U.shape[0])) <= tol
