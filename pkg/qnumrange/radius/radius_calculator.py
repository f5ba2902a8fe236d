import logging
from typing import Optional, Tuple, Union

import numpy as np
from scipy.optimize import minimize

from qnumrange.linalg.operations import extend_to_unitary
from qnumrange.linalg.sampling import complex_gaussian, unit_vector
from qnumrange.linalg.types import ComplexMatrix, QParameter, as_matrix
from qnumrange.radius.optimizer import (
    OptimizerConfig, RadiusEstimate, RestartResult, best_of, gradient_converged, run_restarts, sphere_ascent,
    sphere_tangent,
)
from qnumrange.utils.exceptions import DimensionError, ValidationError

# Below this, ||Ax - <Ax,x>x|| is treated as zero and its subgradient as 0
DEGENERATE_TOL = 1e-14
# BFGS on the joint parametrization runs on finite-difference gradients
DIRECT_GTOL = 1e-6
# A direct restart counts as converged when its pair matches the reduced
# objective at its own x to this relative tolerance
DIRECT_AGREE_TOL = 1e-6


def classical_objective(A: ComplexMatrix, x: np.ndarray) -> Tuple[float, np.ndarray]:
    """|<Ax, x>| and its Euclidean gradient"""
    Ax = A @ x
    w = np.vdot(x, Ax)
    mod = abs(w)
    if mod == 0.0:
        return 0.0, np.zeros_like(x)
    ph = w / mod
    grad = np.conj(ph) * Ax + ph * (A.conj().T @ x)
    return float(mod), grad


def reduced_objective(A: ComplexMatrix, q: Union[float, QParameter], x: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    q|<Ax,x>| + p||Ax - <Ax,x>x|| and its Euclidean gradient

    Off the sphere the second term is evaluated as sqrt(||Ax||^2 - |<Ax,x>|^2);
    both agree for unit x and the gradient is that of this extension.
    """
    qp = QParameter.of(q)
    Ax = A @ x
    AHx = A.conj().T @ x
    w = np.vdot(x, Ax)
    mod = abs(w)
    ph = w / mod if mod > 0.0 else 1.0 + 0.0j

    value = qp.q * mod
    grad = qp.q * (np.conj(ph) * Ax + ph * AHx) if mod > 0.0 else np.zeros_like(x)

    if qp.p > 0.0:
        ax_sq = float(np.real(np.vdot(Ax, Ax)))
        s = ax_sq - mod * mod
        if s > DEGENERATE_TOL * max(1.0, ax_sq):
            root = np.sqrt(s)
            value += qp.p * root
            grad = grad + qp.p * (A.conj().T @ Ax - np.conj(w) * Ax - w * AHx) / root
    return float(value), grad


class RadiusCalculator:
    """Classical and q-numerical radius by restarted ascent, plus sampled q-ranges"""

    def __init__(self, config: Optional[OptimizerConfig] = None):
        self.config = config or OptimizerConfig()
        self.logger = logging.getLogger(__name__)

    def numerical_radius(self, A: ComplexMatrix, config: Optional[OptimizerConfig] = None) -> RadiusEstimate:
        """r(A) = sup |<Ax, x>| over unit x"""
        A = as_matrix(A, "A")
        cfg = config or self.config
        n = A.shape[0]

        def restart(i: int, rng: np.random.Generator) -> RestartResult:
            return sphere_ascent(lambda x: classical_objective(A, x), unit_vector(n, rng), cfg)

        results = run_restarts(restart, cfg, label="numerical_radius")
        best = best_of(results)
        x = best.point
        value = abs(np.vdot(x, A @ x))
        return RadiusEstimate(
            value=float(value),
            witness_x=x,
            restarts_used=len(results),
            converged=any(r.converged for r in results),
            best_gradient_norm=best.gradient_norm,
        )

    def q_radius_reduced(self, A: ComplexMatrix, q: Union[float, QParameter],
                         config: Optional[OptimizerConfig] = None) -> RadiusEstimate:
        """r_q(A) through the single-sphere objective q|<Ax,x>| + p||Ax - <Ax,x>x||"""
        A = as_matrix(A, "A")
        qp = QParameter.of(q)
        cfg = config or self.config
        n = self._check_dimension(A, qp)

        def restart(i: int, rng: np.random.Generator) -> RestartResult:
            return sphere_ascent(lambda x: reduced_objective(A, qp, x), unit_vector(n, rng), cfg)

        results = run_restarts(restart, cfg, label="q_radius_reduced")
        best = best_of(results)
        x = best.point
        y = self.reduced_witness(A, qp, x)
        return RadiusEstimate(
            value=float(abs(np.vdot(y, A @ x))),
            witness_x=x,
            witness_y=y,
            restarts_used=len(results),
            converged=any(r.converged for r in results),
            best_gradient_norm=best.gradient_norm,
        )

    @staticmethod
    def reduced_witness(A: ComplexMatrix, q: QParameter, x: np.ndarray) -> np.ndarray:
        """y = qx + p z with z the phase-aligned unit direction of Ax - <Ax,x>x"""
        if q.p == 0.0:
            return x.copy()
        Ax = A @ x
        w = np.vdot(x, Ax)
        ph = w / abs(w) if abs(w) > 0.0 else 1.0 + 0.0j
        v = Ax - w * x
        v = v - np.vdot(x, v) * x
        nv = np.linalg.norm(v)
        if nv > np.sqrt(DEGENERATE_TOL) * max(1.0, np.linalg.norm(Ax)):
            z = np.conj(ph) * v / nv
        else:
            z = extend_to_unitary([x])[:, 1]
        return q.q * x + q.p * z

    def q_radius_direct(self, A: ComplexMatrix, q: Union[float, QParameter],
                        config: Optional[OptimizerConfig] = None) -> RadiusEstimate:
        """
        r_q(A) = sup |<Ax, y>| over y = qx + p e^{i theta} z, z unit and orthogonal to x

        x, z and theta are optimized jointly by BFGS over an unconstrained
        real parametrization; no phase is eliminated analytically.
        """
        A = as_matrix(A, "A")
        qp = QParameter.of(q)
        cfg = config or self.config
        n = self._check_dimension(A, qp)
        use_z = qp.p > 0.0
        dim = 4 * n + 1 if use_z else 2 * n

        def unpack(theta: np.ndarray) -> Optional[Tuple[np.ndarray, np.ndarray]]:
            a = theta[:n] + 1j * theta[n:2 * n]
            na = np.linalg.norm(a)
            if na == 0.0:
                return None
            x = a / na
            if not use_z:
                return x, x
            b = theta[2 * n:3 * n] + 1j * theta[3 * n:4 * n]
            z = b - np.vdot(x, b) * x
            nz = np.linalg.norm(z)
            if nz == 0.0:
                return None
            y = qp.q * x + qp.p * np.exp(1j * theta[-1]) * (z / nz)
            return x, y

        def loss(theta: np.ndarray) -> float:
            pair = unpack(theta)
            if pair is None:
                return 0.0
            x, y = pair
            return -abs(np.vdot(y, A @ x))

        def restart(i: int, rng: np.random.Generator) -> RestartResult:
            theta0 = rng.standard_normal(dim)
            if use_z:
                theta0[-1] = rng.uniform(0.0, 2.0 * np.pi)
            res = minimize(loss, theta0, method='BFGS',
                           options={'gtol': DIRECT_GTOL, 'maxiter': cfg.max_iters})
            point = np.asarray(res.x)
            converged, grad_norm = self._direct_converged(A, qp, unpack(point), cfg)
            return RestartResult(
                value=float(-res.fun),
                point=point,
                gradient_norm=grad_norm,
                converged=converged,
                iterations=int(getattr(res, 'nit', 0)),
            )

        results = run_restarts(restart, cfg, label="q_radius_direct")
        best = best_of(results)
        pair = unpack(best.point)
        if pair is None:
            x = unit_vector(n, np.random.default_rng(cfg.seed))
            pair = (x, self.reduced_witness(A, qp, x))
        x, y = pair
        return RadiusEstimate(
            value=float(abs(np.vdot(y, A @ x))),
            witness_x=x,
            witness_y=y,
            restarts_used=len(results),
            converged=any(r.converged for r in results),
            best_gradient_norm=best.gradient_norm,
        )

    @staticmethod
    def _direct_converged(A: ComplexMatrix, q: QParameter, pair: Optional[Tuple[np.ndarray, np.ndarray]],
                          cfg: OptimizerConfig) -> Tuple[bool, float]:
        """
        A direct optimum (x, y) must be stationary for the reduced objective
        at x, and y must attain that objective
        """
        if pair is None:
            return False, float('inf')
        x, y = pair
        value = abs(np.vdot(y, A @ x))
        reduced, g = reduced_objective(A, q, x)
        grad_norm = float(np.linalg.norm(sphere_tangent(x, g)))
        agrees = reduced - value <= DIRECT_AGREE_TOL * max(1.0, reduced)
        return bool(agrees and gradient_converged(grad_norm, reduced, cfg, exhausted=True)), grad_norm

    def q_range_sample(self, A: ComplexMatrix, q: Union[float, QParameter],
                       count: int, seed: int) -> np.ndarray:
        """Points <Ax, y> for `count` random admissible pairs (x, y)"""
        A = as_matrix(A, "A")
        qp = QParameter.of(q)
        if count < 1:
            raise ValidationError(f"count must be >= 1, got {count}")
        n = self._check_dimension(A, qp)
        rng = np.random.default_rng(seed)

        X = complex_gaussian(rng, (count, n))
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        if qp.p > 0.0:
            W = complex_gaussian(rng, (count, n))
            W -= np.sum(np.conj(X) * W, axis=1, keepdims=True) * X
            W /= np.linalg.norm(W, axis=1, keepdims=True)
            Y = qp.q * X + qp.p * W
        else:
            Y = X
        AX = X @ A.T
        return np.sum(np.conj(Y) * AX, axis=1)

    @staticmethod
    def _check_dimension(A: ComplexMatrix, q: QParameter) -> int:
        n = A.shape[0]
        if q.p > 0.0 and n < 2:
            raise DimensionError("q < 1 needs n >= 2: no unit y with <x,y> = q exists in dimension 1")
        return n
