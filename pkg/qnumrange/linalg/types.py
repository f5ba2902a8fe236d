from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Union

import numpy as np

from qnumrange.utils.exceptions import DimensionError, ValidationError

# Operators are dense complex128 numpy arrays of shape (n, n)
ComplexMatrix = np.ndarray


@dataclass(frozen=True)
class QParameter:
    """Validated q in (0, 1] together with p = sqrt(1 - q^2)"""
    q: float
    p: float = field(init=False)

    def __post_init__(self):
        try:
            q = float(self.q)
        except (TypeError, ValueError):
            raise ValidationError(f"q must be a real number, got {self.q!r}")
        if not np.isfinite(q) or q <= 0.0 or q > 1.0:
            raise ValidationError(f"q must lie in (0, 1], got {self.q!r}")
        object.__setattr__(self, 'q', q)
        object.__setattr__(self, 'p', float(np.sqrt(max(0.0, 1.0 - q * q))))

    @classmethod
    def of(cls, value: Union[float, "QParameter"]) -> "QParameter":
        if isinstance(value, QParameter):
            return value
        return cls(value)

    def __float__(self) -> float:
        return self.q


class DaggerMode(str, Enum):
    """The four symmetries A, A^t, A^*, conj(A)"""
    IDENTITY = 'identity'
    TRANSPOSE = 'transpose'
    ADJOINT = 'adjoint'
    CONJUGATE = 'conjugate'

    @property
    def transposes(self) -> bool:
        return self in (DaggerMode.TRANSPOSE, DaggerMode.ADJOINT)

    @property
    def conjugates(self) -> bool:
        return self in (DaggerMode.CONJUGATE, DaggerMode.ADJOINT)

    @property
    def is_linear(self) -> bool:
        return not self.conjugates

    @property
    def is_multiplicative(self) -> bool:
        return not self.transposes

    @classmethod
    def from_flags(cls, transposes: bool, conjugates: bool) -> "DaggerMode":
        if transposes and conjugates:
            return cls.ADJOINT
        if transposes:
            return cls.TRANSPOSE
        if conjugates:
            return cls.CONJUGATE
        return cls.IDENTITY

    def compose(self, other: "DaggerMode") -> "DaggerMode":
        """Mode of A -> (A^other)^self; the four modes form a Klein four-group"""
        other = DaggerMode(other)
        return DaggerMode.from_flags(self.transposes != other.transposes,
                                     self.conjugates != other.conjugates)


def as_matrix(value: Any, name: str = "matrix", square: bool = True) -> ComplexMatrix:
    """Coerce to a finite complex128 2-D array, optionally requiring it square"""
    try:
        arr = np.array(value, dtype=np.complex128)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"{name} is not a complex matrix: {e}")
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries")
    return arr


def as_vector(value: Any, name: str = "vector") -> np.ndarray:
    """Coerce to a finite complex128 1-D array"""
    try:
        arr = np.array(value, dtype=np.complex128)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"{name} is not a complex vector: {e}")
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise DimensionError(f"{name} must be a non-empty 1-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries")
    return arr


def require_same_size(*matrices: ComplexMatrix) -> int:
    sizes = {m.shape for m in matrices}
    if len(sizes) != 1:
        raise DimensionError(f"matrix sizes differ: {sorted(sizes)}")
    return matrices[0].shape[0]
