import math
from typing import Any, Dict, List

import numpy as np

from qnumrange.linalg.types import ComplexMatrix
from qnumrange.utils.exceptions import ValidationError


def _pair(z: complex) -> List[float]:
    return [float(z.real), float(z.imag)]


def _scalar_from_pair(pair: Any, where: str) -> complex:
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise ValidationError(f"{where}: expected [re, im], got {pair!r}")
    try:
        re, im = float(pair[0]), float(pair[1])
    except (TypeError, ValueError):
        raise ValidationError(f"{where}: non-numeric entry {pair!r}")
    if not (math.isfinite(re) and math.isfinite(im)):
        raise ValidationError(f"{where}: non-finite entry {pair!r}")
    return complex(re, im)


def scalar_to_json(z: complex) -> List[float]:
    return _pair(complex(z))


def scalar_from_json(pair: Any) -> complex:
    return _scalar_from_pair(pair, "scalar")


def matrix_to_json(A: ComplexMatrix) -> Dict[str, Any]:
    """{"rows": n, "cols": m, "data": [[re, im], ...]} in row-major order"""
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2:
        raise ValidationError(f"expected a 2-D array, got shape {A.shape}")
    return {
        "rows": int(A.shape[0]),
        "cols": int(A.shape[1]),
        "data": [_pair(z) for z in A.ravel()],
    }


def matrix_from_json(payload: Any) -> ComplexMatrix:
    if not isinstance(payload, dict):
        raise ValidationError("matrix JSON must be an object")
    try:
        rows, cols, data = int(payload["rows"]), int(payload["cols"]), payload["data"]
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"matrix JSON needs integer rows/cols and data: {e}")
    if rows < 1 or cols < 1:
        raise ValidationError(f"matrix JSON has invalid shape {rows}x{cols}")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise ValidationError(f"matrix JSON data must hold {rows * cols} entries")
    entries = [_scalar_from_pair(pair, f"data[{i}]") for i, pair in enumerate(data)]
    return np.array(entries, dtype=np.complex128).reshape(rows, cols)


def vector_to_json(x: np.ndarray) -> Dict[str, Any]:
    """Vectors travel as n x 1 matrices"""
    return matrix_to_json(np.asarray(x, dtype=np.complex128).reshape(-1, 1))


def vector_from_json(payload: Any) -> np.ndarray:
    m = matrix_from_json(payload)
    if m.shape[1] != 1:
        raise ValidationError(f"vector JSON must have one column, got {m.shape[1]}")
    return m[:, 0]
