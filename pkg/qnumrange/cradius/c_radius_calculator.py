import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy.linalg import expm
from scipy.spatial.distance import directed_hausdorff

from qnumrange import config as defaults
from qnumrange.linalg.operations import hs_norm, matrix_unit
from qnumrange.linalg.sampling import haar_unitaries, haar_unitary
from qnumrange.linalg.types import ComplexMatrix, as_matrix, require_same_size
from qnumrange.radius.optimizer import (
    OptimizerConfig, RadiusEstimate, RestartResult, best_of, manifold_ascent, run_restarts,
)
from qnumrange.utils.exceptions import ValidationError


@dataclass(frozen=True)
class NormCertificate:
    """Whether r_C is a norm: C must be non-scalar with non-zero trace"""
    is_norm: bool
    is_scalar_c: bool
    trace_c: complex

    def to_dict(self) -> Dict[str, Any]:
        return {'is_norm': self.is_norm, 'is_scalar_c': self.is_scalar_c,
                'trace_c': [float(self.trace_c.real), float(self.trace_c.imag)]}


@dataclass(frozen=True)
class ConvexityReport:
    """Largest distance from a midpoint of two sampled range points to the sample"""
    distance: float
    tol: float
    samples: int
    pairs: int

    @property
    def passed(self) -> bool:
        return self.distance <= self.tol

    def to_dict(self) -> Dict[str, Any]:
        return {'distance': float(self.distance), 'tol': float(self.tol), 'samples': int(self.samples),
                'pairs': int(self.pairs), 'passed': bool(self.passed)}


def midpoint_distance(points: np.ndarray, pairs: int, rng: np.random.Generator) -> float:
    """
    Directed Hausdorff distance from midpoints of `pairs` random point pairs
    to the full point set

    Small for a dense sample of a convex set; a gap in the set shows up as
    midpoints that no sample comes near.
    """
    pts = np.column_stack([np.real(points), np.imag(points)])
    first = rng.integers(0, len(pts), size=pairs)
    second = rng.integers(0, len(pts), size=pairs)
    midpoints = 0.5 * (pts[first] + pts[second])
    return float(directed_hausdorff(midpoints, pts, seed=0)[0])


def c_objective(A: ComplexMatrix, C: ComplexMatrix, U: ComplexMatrix) -> Tuple[float, np.ndarray]:
    """
    |tr(C U*AU)| and the Euclidean gradient of Re(e^{-i phi} tr(C U*AU))

    phi is the phase of the trace at U, so the gradient is that of the
    modulus wherever the trace is non-zero.
    """
    AU = A @ U
    t = np.trace(C @ (U.conj().T @ AU))
    mod = abs(t)
    ph = t / mod if mod > 0.0 else 1.0 + 0.0j
    grad = np.conj(ph) * (AU @ C) + ph * (A.conj().T @ U @ C.conj().T)
    return float(mod), grad


def _unitary_tangent(U: ComplexMatrix, G: ComplexMatrix) -> ComplexMatrix:
    """Skew-Hermitian part of U*G: the Riemannian gradient in the Lie algebra"""
    M = U.conj().T @ G
    return 0.5 * (M - M.conj().T)


def _unitary_retract(U: ComplexMatrix, omega: ComplexMatrix, step: float) -> ComplexMatrix:
    return U @ expm(step * omega)


class CRadiusCalculator:
    """Generalized C-numerical radius r_C(A) = sup |tr(C U*AU)| over unitaries U"""

    def __init__(self, config: Optional[OptimizerConfig] = None):
        self.config = config or OptimizerConfig(restarts=defaults.C_RADIUS_RESTARTS)
        self.logger = logging.getLogger(__name__)

    def c_radius(self, A: ComplexMatrix, C: ComplexMatrix,
                 config: Optional[OptimizerConfig] = None) -> RadiusEstimate:
        """
        Riemannian ascent on U(n): U <- U exp(eta Omega), Omega the
        skew-Hermitian gradient, with restarts from Haar-random unitaries
        """
        A = as_matrix(A, "A")
        C = as_matrix(C, "C")
        n = require_same_size(A, C)
        cfg = config or self.config

        def objective(U: ComplexMatrix) -> Tuple[float, np.ndarray]:
            return c_objective(A, C, U)

        def restart(i: int, rng: np.random.Generator) -> RestartResult:
            return manifold_ascent(objective, haar_unitary(n, rng), cfg,
                                   _unitary_tangent, _unitary_retract)

        results = run_restarts(restart, cfg, label="c_radius")
        best = best_of(results)
        U = best.point
        value = abs(np.trace(C @ U.conj().T @ A @ U))
        return RadiusEstimate(
            value=float(value),
            witness_x=U[:, 0].copy(),
            witness_unitary=U,
            restarts_used=len(results),
            converged=any(r.converged for r in results),
            best_gradient_norm=best.gradient_norm,
        )

    def c_range_sample(self, A: ComplexMatrix, C: ComplexMatrix, count: int, seed: int) -> np.ndarray:
        """Points tr(C U_i* A U_i) for `count` Haar-random unitaries"""
        A = as_matrix(A, "A")
        C = as_matrix(C, "C")
        n = require_same_size(A, C)
        if count < 1:
            raise ValidationError(f"count must be >= 1, got {count}")
        rng = np.random.default_rng(seed)
        points = []
        # Chunked so that 10^5 samples stay within a few MB
        for start in range(0, count, 4096):
            block = haar_unitaries(n, min(4096, count - start), rng)
            similar = np.conj(np.swapaxes(block, 1, 2)) @ A @ block
            points.append(np.einsum('ij,kji->k', C, similar))
        return np.concatenate(points)

    def convexity_check(self, A: ComplexMatrix, C: Optional[ComplexMatrix] = None, seed: int = 0,
                        samples: int = defaults.CONVEXITY_SAMPLES, pairs: int = defaults.CONVEXITY_PAIRS,
                        tol: float = defaults.CONVEXITY_TOL) -> ConvexityReport:
        """
        Sampled convexity of W_C(A); C defaults to E11, the classical range W(A)

        Midpoints of random sample pairs must lie within `tol` of the sample.
        """
        A = as_matrix(A, "A")
        C = matrix_unit(A.shape[0], 0, 0) if C is None else C
        if pairs < 1:
            raise ValidationError(f"pairs must be >= 1, got {pairs}")
        if tol <= 0:
            raise ValidationError(f"tol must be positive, got {tol}")
        points = self.c_range_sample(A, C, samples, seed)
        distance = midpoint_distance(points, pairs, np.random.default_rng(seed + 1))
        report = ConvexityReport(distance=distance, tol=tol, samples=samples, pairs=pairs)
        if not report.passed:
            self.logger.warning(f"Midpoint distance {distance:.3g} exceeds {tol:g}")
        return report

    def norm_certificate(self, C: ComplexMatrix, tol: float = defaults.SCALAR_TOL) -> NormCertificate:
        C = as_matrix(C, "C")
        if tol <= 0:
            raise ValidationError(f"tol must be positive, got {tol}")
        n = C.shape[0]
        trace_c = complex(np.trace(C))
        deviation = hs_norm(C - (trace_c / n) * np.eye(n))
        is_scalar = deviation <= tol * max(1.0, hs_norm(C))
        is_norm = (not is_scalar) and abs(trace_c) > tol
        return NormCertificate(is_norm=bool(is_norm), is_scalar_c=bool(is_scalar), trace_c=trace_c)
