from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Union

import numpy as np

from qnumrange.linalg.matrix_io import matrix_from_json, matrix_to_json, scalar_from_json, scalar_to_json
from qnumrange.linalg.operations import dagger, hs_norm
from qnumrange.linalg.sampling import complex_gaussian, haar_unitary
from qnumrange.linalg.types import ComplexMatrix, DaggerMode, as_matrix
from qnumrange.utils.exceptions import DimensionError, ValidationError

UNITARY_TOL = 1e-10
MU_TOL = 1e-12


@dataclass(frozen=True)
class IsometryDescriptor:
    """(S0, mu, U, mode) realizing phi(A) = S0 + mu U* A^mode U"""
    s0: ComplexMatrix
    mu: complex
    u: ComplexMatrix
    mode: DaggerMode

    def __post_init__(self):
        s0 = as_matrix(self.s0, "s0")
        u = as_matrix(self.u, "u")
        if s0.shape != u.shape:
            raise DimensionError(f"s0 and u differ in size: {s0.shape} vs {u.shape}")
        defect = hs_norm(u.conj().T @ u - np.eye(u.shape[0]))
        if defect > UNITARY_TOL:
            raise ValidationError(f"u is not unitary (||u*u - I|| = {defect:.3e})")
        mu = complex(self.mu)
        if abs(abs(mu) - 1.0) > MU_TOL:
            raise ValidationError(f"mu must have unit modulus, got |mu| = {abs(mu):.15g}")
        object.__setattr__(self, 's0', s0)
        object.__setattr__(self, 'u', u)
        object.__setattr__(self, 'mu', mu)
        object.__setattr__(self, 'mode', DaggerMode(self.mode))

    @property
    def n(self) -> int:
        return self.u.shape[0]

    def linear_part(self, A: ComplexMatrix) -> ComplexMatrix:
        """psi(A) = mu U* A^mode U"""
        return self.mu * (self.u.conj().T @ dagger(A, self.mode) @ self.u)

    def as_map(self) -> Callable[[ComplexMatrix], ComplexMatrix]:
        return lambda A: apply(self, A)


def apply(d: IsometryDescriptor, A: ComplexMatrix) -> ComplexMatrix:
    A = as_matrix(A, "A")
    if A.shape != d.u.shape:
        raise DimensionError(f"descriptor acts on {d.u.shape}, got {A.shape}")
    return d.s0 + d.linear_part(A)


def compose(d1: IsometryDescriptor, d2: IsometryDescriptor) -> IsometryDescriptor:
    """
    Descriptor of A -> apply(d1, apply(d2, A))

    Pushing U2* B U2 through the outer dagger gives conj(U2) when the outer
    mode transposes without conjugating or conjugates without transposing;
    a conjugating outer mode also conjugates mu2.
    """
    if d1.n != d2.n:
        raise DimensionError(f"cannot compose descriptors of sizes {d1.n} and {d2.n}")
    outer = d1.mode
    inner_u = d2.u if outer.transposes == outer.conjugates else np.conj(d2.u)
    mu2 = np.conj(d2.mu) if outer.conjugates else d2.mu
    u = inner_u @ d1.u
    return IsometryDescriptor(
        s0=apply(d1, d2.s0),
        mu=d1.mu * mu2 / abs(d1.mu * mu2),
        u=u,
        mode=outer.compose(d2.mode),
    )


def identity_descriptor(n: int) -> IsometryDescriptor:
    return IsometryDescriptor(s0=np.zeros((n, n), dtype=np.complex128), mu=1.0,
                              u=np.eye(n, dtype=np.complex128), mode=DaggerMode.IDENTITY)


def random_descriptor(n: int, seed: int, mode: Optional[Union[str, DaggerMode]] = None) -> IsometryDescriptor:
    """Gaussian S0, uniform phase mu, Haar U, and a uniform mode unless one is given"""
    if n < 1:
        raise DimensionError(f"n must be at least 1, got {n}")
    rng = np.random.default_rng(seed)
    s0 = complex_gaussian(rng, (n, n))
    mu = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
    u = haar_unitary(n, rng)
    if mode is None:
        mode = list(DaggerMode)[int(rng.integers(0, len(DaggerMode)))]
    return IsometryDescriptor(s0=s0, mu=mu, u=u, mode=DaggerMode(mode))


def descriptor_to_dict(d: IsometryDescriptor) -> Dict[str, Any]:
    return {
        's0': matrix_to_json(d.s0),
        'mu': scalar_to_json(d.mu),
        'u': matrix_to_json(d.u),
        'mode': d.mode.value,
    }


def descriptor_from_dict(payload: Dict[str, Any]) -> IsometryDescriptor:
    if not isinstance(payload, dict):
        raise ValidationError("descriptor JSON must be an object")
    try:
        mode = DaggerMode(payload['mode'])
    except KeyError as e:
        raise ValidationError(f"descriptor JSON lacks {e}")
    except ValueError:
        raise ValidationError(f"unknown dagger mode {payload.get('mode')!r}")
    try:
        mu = scalar_from_json(payload['mu'])
        s0 = matrix_from_json(payload['s0'])
        u = matrix_from_json(payload['u'])
    except KeyError as e:
        raise ValidationError(f"descriptor JSON lacks {e}")
    return IsometryDescriptor(s0=s0, mu=mu, u=u, mode=mode)
