import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.optimize import minimize

from qnumrange import config
from qnumrange.linalg.matrix_io import matrix_to_json, vector_to_json
from qnumrange.utils.exceptions import ValidationError

logger = logging.getLogger(__name__)

# Sufficient-increase constant; on a quadratic model it caps accepted steps
# at 1.5/L, so the iterate cannot oscillate across the optimum
ARMIJO = 0.25
# Accepted loss of f per step, relative to |f|; near the optimum the Armijo gain
# falls below the rounding of f
ROUNDING_SLACK = 8 * np.finfo(float).eps
# Iterations without a gain in f beyond ROUNDING_SLACK before giving up
STALL_ITERS = 25
STEP_GROWTH = 2.0
MAX_STEP = 1e6


@dataclass(frozen=True)
class OptimizerConfig:
    """Restart / iteration / tolerance settings shared by every ascent"""
    restarts: int = config.DEFAULT_RESTARTS
    max_iters: int = config.DEFAULT_MAX_ITERS
    step_tol: float = config.DEFAULT_STEP_TOL
    grad_tol: float = config.DEFAULT_GRAD_TOL
    seed: int = config.DEFAULT_SEED
    threads: int = config.DEFAULT_THREADS

    def __post_init__(self):
        if self.restarts < 1:
            raise ValidationError(f"restarts must be >= 1, got {self.restarts}")
        if self.max_iters < 1:
            raise ValidationError(f"max_iters must be >= 1, got {self.max_iters}")
        if not (self.step_tol > 0 and self.grad_tol > 0):
            raise ValidationError("step_tol and grad_tol must be positive")
        if self.threads < 1:
            raise ValidationError(f"threads must be >= 1, got {self.threads}")

    def with_restarts(self, restarts: int) -> "OptimizerConfig":
        return OptimizerConfig(restarts, self.max_iters, self.step_tol,
                               self.grad_tol, self.seed, self.threads)

    def with_seed(self, seed: int) -> "OptimizerConfig":
        return OptimizerConfig(self.restarts, self.max_iters, self.step_tol,
                               self.grad_tol, seed, self.threads)

    def sub_seed(self, index: int) -> int:
        return int(self.seed) ^ int(index)


@dataclass
class RadiusEstimate:
    """Best value found by a restarted ascent, with its witness and diagnostics"""
    value: float
    witness_x: np.ndarray
    witness_y: Optional[np.ndarray] = None
    witness_unitary: Optional[np.ndarray] = None
    restarts_used: int = 0
    converged: bool = False
    best_gradient_norm: float = float('inf')

    def to_dict(self) -> Dict[str, Any]:
        return {
            'value': float(self.value),
            'witness_x': vector_to_json(self.witness_x),
            'witness_y': None if self.witness_y is None else vector_to_json(self.witness_y),
            'witness_unitary': None if self.witness_unitary is None else matrix_to_json(self.witness_unitary),
            'restarts_used': int(self.restarts_used),
            'converged': bool(self.converged),
            'best_gradient_norm': float(self.best_gradient_norm),
        }


@dataclass
class RestartResult:
    value: float
    point: np.ndarray
    gradient_norm: float
    converged: bool
    iterations: int
    extra: Dict[str, Any] = field(default_factory=dict)


# objective(point) -> (value, euclidean gradient); gradient g satisfies
# f(x + d) ~ f(x) + Re<d, g>
Objective = Callable[[np.ndarray], Tuple[float, np.ndarray]]
# tangent(point, g) -> Riemannian gradient; retract(point, direction, step) -> point
Tangent = Callable[[np.ndarray, np.ndarray], np.ndarray]
Retraction = Callable[[np.ndarray, np.ndarray, float], np.ndarray]


def gradient_converged(grad_norm: float, f: float, cfg: OptimizerConfig, exhausted: bool = False) -> bool:
    """
    Stopping test relative to max(1, |f|)

    `exhausted` marks a run that can make no further progress at rounding
    precision (stalled or line search failed); there the looser
    sqrt(grad_tol) threshold applies.
    """
    scale = max(1.0, abs(f))
    if grad_norm <= cfg.grad_tol * scale:
        return True
    return exhausted and grad_norm <= np.sqrt(cfg.grad_tol) * scale


def manifold_ascent(objective: Objective, start: np.ndarray, cfg: OptimizerConfig,
                    tangent: Tangent, retract: Retraction) -> RestartResult:
    """
    Riemannian gradient ascent with backtracking

    Each line search starts from the last accepted step, which grows by
    STEP_GROWTH only when it was accepted without backtracking. Stops on the
    relative grad_tol, on a step below step_tol, or after STALL_ITERS
    iterations without a gain in f.
    """
    point = start
    f, g = objective(point)
    step = 1.0
    grad_norm = float('inf')
    best_f = f
    stale = 0
    converged = False
    exhausted = False
    iteration = 0

    for iteration in range(1, cfg.max_iters + 1):
        direction = tangent(point, g)
        grad_norm = float(np.linalg.norm(direction))
        if gradient_converged(grad_norm, f, cfg):
            converged = True
            break

        slack = ROUNDING_SLACK * max(1.0, abs(f))
        accepted = False
        first_try = True
        while step >= cfg.step_tol:
            candidate = retract(point, direction, step)
            f_new, g_new = objective(candidate)
            if f_new >= f + ARMIJO * step * grad_norm ** 2 - slack:
                accepted = True
                break
            step *= 0.5
            first_try = False

        if not accepted:
            exhausted = True
            break

        point, f, g = candidate, f_new, g_new
        if first_try:
            step = min(STEP_GROWTH * step, MAX_STEP)

        if f > best_f + slack:
            best_f, stale = f, 0
        else:
            stale += 1
            if stale > STALL_ITERS:
                exhausted = True
                break

    if not converged:
        grad_norm = float(np.linalg.norm(tangent(point, g)))
        converged = gradient_converged(grad_norm, f, cfg, exhausted)
    return RestartResult(value=float(f), point=point, gradient_norm=grad_norm,
                         converged=converged, iterations=iteration)


def sphere_tangent(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    return g - np.real(np.vdot(x, g)) * x


def sphere_retract(x: np.ndarray, direction: np.ndarray, step: float) -> np.ndarray:
    y = x + step * direction
    return y / np.linalg.norm(y)


def sphere_ascent(objective: Objective, x0: np.ndarray, cfg: OptimizerConfig) -> RestartResult:
    """
    Projected gradient ascent on the unit sphere with normalization retraction,
    finished by a BFGS polish unless the ascent already met grad_tol
    """
    result = manifold_ascent(objective, x0 / np.linalg.norm(x0), cfg,
                             sphere_tangent, sphere_retract)
    if result.gradient_norm <= cfg.grad_tol * max(1.0, abs(result.value)):
        return result
    return sphere_polish(objective, result, cfg)


def sphere_polish(objective: Objective, result: RestartResult, cfg: OptimizerConfig) -> RestartResult:
    """
    BFGS on f(v / ||v||) over real coordinates of v, started at result.point

    The extension is scale invariant, so its gradient is the sphere gradient
    divided by ||v||. The polished point replaces the start only if f did
    not drop.
    """
    n = result.point.size

    def to_complex(v: np.ndarray) -> np.ndarray:
        z = v[:n] + 1j * v[n:]
        return z / np.linalg.norm(z)

    def loss(v: np.ndarray) -> Tuple[float, np.ndarray]:
        z = v[:n] + 1j * v[n:]
        r = np.linalg.norm(z)
        f, g = objective(z / r)
        d = -sphere_tangent(z / r, g) / r
        return -f, np.concatenate([d.real, d.imag])

    x0 = result.point
    res = minimize(loss, np.concatenate([x0.real, x0.imag]), jac=True, method='BFGS',
                   options={'gtol': cfg.grad_tol * max(1.0, abs(result.value)),
                            'maxiter': cfg.max_iters})
    x = to_complex(np.asarray(res.x))
    f, g = objective(x)
    if f < result.value:
        return result
    grad_norm = float(np.linalg.norm(sphere_tangent(x, g)))
    # status 2: line search lost precision, i.e. no further progress at rounding level
    converged = gradient_converged(grad_norm, f, cfg, exhausted=res.status in (0, 2)) or result.converged
    return RestartResult(value=float(f), point=x, gradient_norm=grad_norm,
                         converged=converged, iterations=result.iterations + int(res.nit))


def run_restarts(single_restart: Callable[[int, np.random.Generator], RestartResult],
                 cfg: OptimizerConfig, label: str = "ascent") -> List[RestartResult]:
    """
    Run cfg.restarts independent restarts; restart i draws from seed ^ i

    The result list is in restart order whatever the thread count, so the
    merged maximum does not depend on execution order.
    """
    def task(i: int) -> RestartResult:
        return single_restart(i, np.random.default_rng(cfg.sub_seed(i)))

    if cfg.threads > 1 and cfg.restarts > 1:
        results = Parallel(n_jobs=min(cfg.threads, cfg.restarts), prefer="threads")(
            delayed(task)(i) for i in range(cfg.restarts)
        )
    else:
        results = [task(i) for i in range(cfg.restarts)]

    if not any(r.converged for r in results):
        logger.warning(f"{label}: no restart met grad_tol={cfg.grad_tol:g}; value is a lower bound")
    else:
        logger.debug(f"{label}: {sum(r.converged for r in results)}/{len(results)} restarts converged")
    return list(results)


def best_of(results: List[RestartResult]) -> RestartResult:
    """Maximum value, lowest restart index on ties"""
    best = results[0]
    for r in results[1:]:
        if r.value > best.value:
            best = r
    return best
