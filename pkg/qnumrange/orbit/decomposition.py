import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from scipy import linalg as sla

from qnumrange import config as defaults
from qnumrange.linalg.operations import extend_to_unitary, matrix_unit, numerical_rank, schatten_norm
from qnumrange.linalg.sampling import complex_gaussian
from qnumrange.linalg.types import ComplexMatrix, QParameter, as_matrix
from qnumrange.orbit.saturated_orbit import OrbitElement, orbit_element_from_matrix
from qnumrange.utils.exceptions import DimensionError, DomainError, ValidationError

logger = logging.getLogger(__name__)

# Singular values above SPAN_TOL * largest count towards a sampled span
SPAN_TOL = 1e-6


@dataclass
class SpanReport:
    """Numerical real dimension of a sampled family of matrices"""
    dimension: int
    expected_dimension: int
    singular_values: List[float]
    containment_residual: float
    samples: int
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'dimension': int(self.dimension),
            'expected_dimension': int(self.expected_dimension),
            'singular_values': [float(s) for s in self.singular_values],
            'containment_residual': float(self.containment_residual),
            'samples': int(self.samples),
            'details': dict(self.details),
        }


def _rank_one_frame(R: ComplexMatrix) -> Tuple[ComplexMatrix, complex, float, np.ndarray, np.ndarray]:
    """
    Unitary V with V* R V = xi E11 + eta E12 (eta real, >= 0)

    Returns (V, xi, eta, u, v) for R = sigma u (x) v*.
    """
    u_mat, s, vh = sla.svd(R)
    u = u_mat[:, 0]
    v = np.conj(vh[0])
    sigma = s[0]
    xi = complex(sigma * np.vdot(v, u))
    v_perp = v - np.vdot(u, v) * u
    eta = float(sigma * np.linalg.norm(v_perp))
    if np.linalg.norm(v_perp) > 1e-12:
        w = v_perp / np.linalg.norm(v_perp)
        w = w - np.vdot(u, w) * u
        V = extend_to_unitary([u, w / np.linalg.norm(w)])
    else:
        V = extend_to_unitary([u])
        eta = 0.0
    return V, xi, eta, u, v


def _circle_pair(center: complex, radius: float, direction: complex) -> Tuple[complex, complex]:
    """z, z' with z + z' = 2 center and |z| = |z'| = radius, upper solution first"""
    h = np.sqrt(max(0.0, radius * radius - abs(center) ** 2))
    offset = 1j * direction * h
    return center + offset, center - offset


def decompose_rank_one(R: ComplexMatrix, q: Union[float, QParameter], t: float = 0.0,
                       k: int = 3, p_prime: Optional[float] = None) -> Tuple[OrbitElement, OrbitElement]:
    """
    Split a rank-one R with ||R|| < min(2q, 2p) into two members of SU(C_q)

    In the frame where R = xi E11 + eta E12 the summands are
      z1 E11 + z2 E12 + r e^{it} E1k  and  z3 E11 + z4 E12 - r e^{it} E1k
    with |z1| = |z3| = q, |z2| = |z4| = p' and r = sqrt(p^2 - p'^2).
    k is a 1-based column index >= 3.
    """
    R = as_matrix(R, "R")
    qp = QParameter.of(q)
    n = R.shape[0]
    if qp.p == 0.0:
        raise DomainError("q = 1 leaves no room for a decomposition: ||R|| < min(2q, 2p) = 0 is impossible")
    if k < 3:
        raise ValidationError(f"column index k must be >= 3, got {k}")
    if n < k:
        raise DimensionError(f"column {k} does not exist in dimension {n}")
    rank = numerical_rank(R, defaults.RANK_TOL)
    if rank != 1:
        raise DomainError(f"R must have rank one, got numerical rank {rank}")
    norm = schatten_norm(R, 'operator')
    bound = min(2.0 * qp.q, 2.0 * qp.p)
    if norm >= bound:
        raise DomainError(f"||R|| = {norm:.6g} must be below min(2q, 2p) = {bound:.6g}")

    V, xi, eta, u, v = _rank_one_frame(R)
    if abs(xi) >= 2.0 * qp.q or eta >= 2.0 * qp.p:
        raise DomainError(f"reduced coefficients out of reach: |xi|={abs(xi):.6g}, eta={eta:.6g}")

    if p_prime is None:
        p_prime = 0.5 * (0.5 * eta + qp.p)
    elif not (0.5 * eta <= p_prime < qp.p):
        raise ValidationError(f"p' must lie in [{0.5 * eta:.6g}, {qp.p:.6g}), got {p_prime}")

    direction = xi / abs(xi) if abs(xi) > 0.0 else 1.0 + 0.0j
    z1, z3 = _circle_pair(0.5 * xi, qp.q, direction)
    z2, z4 = _circle_pair(0.5 * eta, p_prime, 1.0 + 0.0j)
    r = np.sqrt(max(0.0, qp.p ** 2 - p_prime ** 2))
    tail = r * np.exp(1j * t) * matrix_unit(n, 0, k - 1)

    A_red = z1 * matrix_unit(n, 0, 0) + z2 * matrix_unit(n, 0, 1) + tail
    B_red = z3 * matrix_unit(n, 0, 0) + z4 * matrix_unit(n, 0, 1) - tail
    Vh = V.conj().T
    A = V @ A_red @ Vh
    # B = R - A keeps the sum exact to rounding
    B = R - A
    return orbit_element_from_matrix(A, qp), orbit_element_from_matrix(B, qp)


def _real_span(samples: List[ComplexMatrix], tol: float) -> Tuple[int, np.ndarray]:
    rows = []
    for M in samples:
        flat = M.ravel()
        vec = np.concatenate([flat.real, flat.imag])
        norm = np.linalg.norm(vec)
        if norm > 0.0:
            rows.append(vec / norm)
    if not rows:
        return 0, np.zeros(0)
    s = sla.svdvals(np.vstack(rows))
    return int(np.sum(s > tol * s[0])), s


def rank_one_decomposition_span(R: ComplexMatrix, q: Union[float, QParameter], samples: int = 200,
                                seed: int = 0, tol: float = SPAN_TOL) -> SpanReport:
    """
    Real span of sampled summands A with A and R - A in SU(C_q)

    Samples vary t, p' and k, and half of them decompose R* and take
    adjoints. All summands lie in {u (x) y*} + {x (x) v*}, of real
    dimension 4n - 2.
    """
    R = as_matrix(R, "R")
    qp = QParameter.of(q)
    n = R.shape[0]
    if samples < 1:
        raise ValidationError(f"samples must be >= 1, got {samples}")
    rng = np.random.default_rng(seed)
    _, _, eta, u, v = _rank_one_frame(R)
    _, _, eta_adj, _, _ = _rank_one_frame(R.conj().T)
    Pu = np.eye(n) - np.outer(u, u.conj())
    Pv = np.eye(n) - np.outer(v, v.conj())

    family: List[ComplexMatrix] = []
    residual = 0.0
    for i in range(samples):
        adjoint = i % 2 == 1
        low = 0.5 * (eta_adj if adjoint else eta)
        p_prime = rng.uniform(low, qp.p)
        t = rng.uniform(0.0, 2.0 * np.pi)
        k = int(rng.integers(3, n + 1))
        if adjoint:
            a, b = decompose_rank_one(R.conj().T, qp, t=t, k=k, p_prime=p_prime)
            pair = (a.matrix.conj().T, b.matrix.conj().T)
        else:
            a, b = decompose_rank_one(R, qp, t=t, k=k, p_prime=p_prime)
            pair = (a.matrix, b.matrix)
        for M in pair:
            residual = max(residual, schatten_norm(Pu @ M @ Pv, 'operator'))
            family.append(M)

    dimension, s = _real_span(family, tol)
    logger.debug(f"rank-one span: dimension {dimension} from {len(family)} summands")
    return SpanReport(dimension=dimension, expected_dimension=4 * n - 2,
                      singular_values=s.tolist(), containment_residual=residual,
                      samples=len(family))


def rank_two_decomposition_span(R: ComplexMatrix, samples: int = 200, seed: int = 0,
                                tol: float = SPAN_TOL) -> SpanReport:
    """
    Real span of rank-one A with R - A rank one, for a rank-two R

    In the singular frame R = diag(s1, s2), A = a (x) b* splits R iff
    b* diag(s1, s2)^{-1} a = 1, so a is rescaled onto that affine constraint.
    """
    R = as_matrix(R, "R")
    if samples < 1:
        raise ValidationError(f"samples must be >= 1, got {samples}")
    rank = numerical_rank(R, defaults.RANK_TOL)
    if rank != 2:
        raise DomainError(f"R must have rank two, got numerical rank {rank}")
    n = R.shape[0]
    rng = np.random.default_rng(seed)
    u_mat, s, vh = sla.svd(R)
    P = u_mat[:, :2]
    Q = vh[:2].conj().T
    inv = np.diag(1.0 / s[:2])
    Pp = np.eye(n) - P @ P.conj().T
    Qp = np.eye(n) - Q @ Q.conj().T

    family: List[ComplexMatrix] = []
    residual = 0.0
    while len(family) < samples:
        a = complex_gaussian(rng, 2)
        b = complex_gaussian(rng, 2)
        scale = np.vdot(b, inv @ a)
        if abs(scale) < 1e-3:
            continue
        a = a / scale
        A = P @ np.outer(a, b.conj()) @ Q.conj().T
        residual = max(residual, schatten_norm(Pp @ A, 'operator'), schatten_norm(A @ Qp, 'operator'),
                       float(sla.svdvals(R - A)[1]) / max(1.0, s[0]))
        family.append(A)

    dimension, sv = _real_span(family, tol)
    logger.debug(f"rank-two span: dimension {dimension} from {len(family)} summands")
    return SpanReport(dimension=dimension, expected_dimension=7, singular_values=sv.tolist(),
                      containment_residual=residual, samples=len(family))
