import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
from scipy import linalg as sla

from qnumrange import config as defaults
from qnumrange.linalg.matrix_io import (
    matrix_from_json, matrix_to_json, scalar_from_json, scalar_to_json, vector_from_json, vector_to_json,
)
from qnumrange.linalg.operations import dyad, extend_to_unitary, hs_norm, numerical_rank
from qnumrange.linalg.sampling import orthogonal_unit_vector, unit_vector
from qnumrange.linalg.types import ComplexMatrix, QParameter, as_matrix, as_vector
from qnumrange.utils.exceptions import DimensionError, DomainError, ValidationError

logger = logging.getLogger(__name__)

# Loosest membership accepted by canonicalize
CANONICAL_MEMBERSHIP_TOL = 1e-6
# Entries below this count as zero when fixing phases
PHASE_ZERO_TOL = 1e-10


@dataclass(frozen=True)
class OrbitElement:
    """
    Rank-one member phase * (x (x) y*) of SU(C_q) with <x, y> = q

    canonical_phase and canonical_unitary satisfy
    matrix = canonical_phase * U* C_q U.
    """
    matrix: ComplexMatrix
    x: np.ndarray
    y: np.ndarray
    phase: complex
    canonical_unitary: ComplexMatrix
    canonical_phase: complex

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass
class OrbitMembership:
    """Outcome of the rank / trace / Hilbert-Schmidt membership test"""
    in_orbit: bool
    rank: int
    trace_modulus: float
    hs_norm: float

    def __bool__(self) -> bool:
        return self.in_orbit

    def to_dict(self) -> Dict[str, Any]:
        return {'in_orbit': bool(self.in_orbit), 'rank': int(self.rank),
                'trace_modulus': float(self.trace_modulus), 'hs_norm': float(self.hs_norm)}


def build_cq(q: Union[float, QParameter], n: int) -> ComplexMatrix:
    """C_q = q E11 + p E12"""
    qp = QParameter.of(q)
    if n < 2:
        raise DimensionError(f"C_q needs n >= 2 (E12 has two columns), got n={n}")
    C = np.zeros((n, n), dtype=np.complex128)
    C[0, 0] = qp.q
    C[0, 1] = qp.p
    return C


def _unit_phase(z: complex, name: str) -> complex:
    z = complex(z)
    if not np.isfinite(z) or abs(abs(z) - 1.0) > defaults.ORBIT_TOL:
        raise ValidationError(f"{name} must have unit modulus, got |{name}|={abs(z):.3e}")
    return z / abs(z)


def _positive_leading(v: np.ndarray) -> np.ndarray:
    """Rotate v so its first entry of non-negligible modulus is real positive"""
    idx = np.flatnonzero(np.abs(v) > PHASE_ZERO_TOL * max(1.0, np.max(np.abs(v))))
    if idx.size == 0:
        return v
    lead = v[idx[0]]
    return v * (np.conj(lead) / abs(lead))


def is_in_orbit(A: ComplexMatrix, q: Union[float, QParameter], tol: float = defaults.ORBIT_TOL) -> OrbitMembership:
    """Rank one, |tr A| = q and ||A||_2 = 1, each up to tol"""
    A = as_matrix(A, "A")
    qp = QParameter.of(q)
    if tol <= 0:
        raise ValidationError(f"tol must be positive, got {tol}")
    rank = numerical_rank(A, tol)
    trace_mod = abs(np.trace(A))
    norm = hs_norm(A)
    member = rank == 1 and abs(trace_mod - qp.q) <= tol and abs(norm - 1.0) <= tol
    return OrbitMembership(in_orbit=bool(member), rank=rank, trace_modulus=float(trace_mod), hs_norm=norm)


def canonicalize(A: ComplexMatrix, q: Union[float, QParameter]) -> Tuple[complex, ComplexMatrix]:
    """
    (theta, U) with A = theta U* C_q U

    A is factored as x (x) y'* through its SVD, the trace phase is moved
    into theta, and U is the inverse of a unitary sending e1 to x and e2 to
    the normalized component of y orthogonal to x.
    """
    A = as_matrix(A, "A")
    qp = QParameter.of(q)
    membership = is_in_orbit(A, qp, CANONICAL_MEMBERSHIP_TOL)
    if not membership:
        raise DomainError(f"matrix is not in SU(C_q) for q={qp.q:g}: {membership.to_dict()}")

    u_mat = sla.svd(A)[0]
    x = _positive_leading(u_mat[:, 0])
    # A = x (x) y'* with y' = A* x
    y_prime = A.conj().T @ x
    tr = np.vdot(y_prime, x)
    theta = tr / abs(tr)
    y = theta * y_prime

    if qp.p == 0.0:
        V = extend_to_unitary([x])
    else:
        z = y - np.vdot(x, y) * x
        z = z / np.linalg.norm(z)
        z = z - np.vdot(x, z) * x
        V = extend_to_unitary([x, z / np.linalg.norm(z)])

    U = V.conj().T
    lead = U.ravel(order='F')
    idx = np.flatnonzero(np.abs(lead) > PHASE_ZERO_TOL)[0]
    U = U * (np.conj(lead[idx]) / abs(lead[idx]))
    return complex(theta), U


def orbit_element_from_matrix(A: ComplexMatrix, q: Union[float, QParameter]) -> OrbitElement:
    """Certificate (x, y, phase, theta, U) for a member of SU(C_q)"""
    A = as_matrix(A, "A")
    qp = QParameter.of(q)
    theta, U = canonicalize(A, qp)
    n = A.shape[0]
    e1 = np.zeros(n, dtype=np.complex128)
    e1[0] = 1.0
    cq_row = np.conj(build_cq(qp, n)[0])
    x = U.conj().T @ e1
    y = U.conj().T @ cq_row
    return OrbitElement(matrix=A.copy(), x=x, y=y, phase=theta,
                        canonical_unitary=U, canonical_phase=theta)


def make_orbit_element(q: Union[float, QParameter], x: np.ndarray, w: Optional[np.ndarray],
                       theta: complex = 1.0) -> OrbitElement:
    """theta * (x (x) y*) with y = q x + p w; w is ignored when q = 1"""
    qp = QParameter.of(q)
    x = as_vector(x, "x")
    theta = _unit_phase(theta, "theta")
    if abs(np.linalg.norm(x) - 1.0) > defaults.ORBIT_TOL:
        raise ValidationError(f"x must be a unit vector, got norm {np.linalg.norm(x):.3e}")
    n = x.shape[0]
    if n < 2:
        raise DimensionError("orbit elements need n >= 2")

    if qp.p > 0.0:
        if w is None:
            raise ValidationError("w is required when q < 1")
        w = as_vector(w, "w")
        if w.shape != x.shape:
            raise DimensionError(f"x and w differ in length: {x.shape[0]} vs {w.shape[0]}")
        if abs(np.linalg.norm(w) - 1.0) > defaults.ORBIT_TOL:
            raise ValidationError(f"w must be a unit vector, got norm {np.linalg.norm(w):.3e}")
        overlap = abs(np.vdot(x, w))
        if overlap > defaults.ORBIT_TOL:
            raise ValidationError(f"w must be orthogonal to x, got |<x,w>|={overlap:.3e}")
        y = qp.q * x + qp.p * w
    else:
        y = x.copy()

    matrix = theta * dyad(x, y)
    canon_theta, U = canonicalize(matrix, qp)
    return OrbitElement(matrix=matrix, x=x.copy(), y=y, phase=theta,
                        canonical_unitary=U, canonical_phase=canon_theta)


def random_orbit_element(q: Union[float, QParameter], n: int, rng: np.random.Generator) -> OrbitElement:
    x = unit_vector(n, rng)
    w = orthogonal_unit_vector(x, rng)
    theta = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
    return make_orbit_element(q, x, w, theta)


def orbit_element_to_dict(e: OrbitElement) -> Dict[str, Any]:
    return {
        'matrix': matrix_to_json(e.matrix),
        'x': vector_to_json(e.x),
        'y': vector_to_json(e.y),
        'phase': scalar_to_json(e.phase),
        'theta': scalar_to_json(e.canonical_phase),
        'U': matrix_to_json(e.canonical_unitary),
    }


def orbit_element_from_dict(payload: Dict[str, Any]) -> OrbitElement:
    if not isinstance(payload, dict):
        raise ValidationError("orbit element JSON must be an object")
    try:
        return OrbitElement(
            matrix=matrix_from_json(payload['matrix']),
            x=vector_from_json(payload['x']),
            y=vector_from_json(payload['y']),
            phase=scalar_from_json(payload['phase']),
            canonical_unitary=matrix_from_json(payload['U']),
            canonical_phase=scalar_from_json(payload['theta']),
        )
    except KeyError as e:
        raise ValidationError(f"orbit element JSON lacks {e}")
