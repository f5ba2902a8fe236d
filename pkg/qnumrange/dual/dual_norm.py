import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Union

import numpy as np

from qnumrange import config as defaults
from qnumrange.dual.atomic_master import (
    caratheodory_reduce, phase_grid, polish_coefficients, solve_master,
)
from qnumrange.linalg.matrix_io import matrix_to_json, scalar_to_json
from qnumrange.linalg.operations import schatten_norm
from qnumrange.linalg.sampling import complex_gaussian
from qnumrange.linalg.types import ComplexMatrix, QParameter, as_matrix, require_same_size
from qnumrange.orbit.saturated_orbit import (
    OrbitElement, make_orbit_element, orbit_element_to_dict, random_orbit_element,
)
from qnumrange.radius.equivalence import InequalityCheck, beta_constant
from qnumrange.radius.optimizer import OptimizerConfig, manifold_ascent, sphere_retract, sphere_tangent
from qnumrange.radius.radius_calculator import RadiusCalculator
from qnumrange.utils.exceptions import DimensionError, ValidationError

# A priced atom must beat the current dual constraint by this much to enter
PRICING_TOL = 1e-9
DUALITY_SLACK = 1e-3


@dataclass
class DualEstimate:
    """Two-sided estimate lower <= r_q*(T) <= upper with its certificates"""
    lower: float
    upper: float
    atoms: List[OrbitElement]
    coefficients: List[complex]
    feasibility_residual: float
    pairing_witness: ComplexMatrix
    converged: bool = False
    iterations: int = 0

    @property
    def gap(self) -> float:
        """Relative gap (upper - lower) / upper, 0 when both vanish"""
        if self.upper <= 0.0:
            return 0.0
        return max(0.0, (self.upper - self.lower) / self.upper)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'lower': float(self.lower),
            'upper': float(self.upper),
            'gap': float(self.gap),
            'converged': bool(self.converged),
            'iterations': int(self.iterations),
            'feasibility_residual': float(self.feasibility_residual),
            'atoms': [orbit_element_to_dict(a) for a in self.atoms],
            'coefficients': [scalar_to_json(c) for c in self.coefficients],
            'pairing_witness': matrix_to_json(self.pairing_witness),
        }


@dataclass
class SandwichReport:
    """||T||_1 <= r_q*(T) <= beta(q) ||T||_1 against the two-sided estimate"""
    trace_norm: float
    lower: float
    upper: float
    beta: float
    checks: Dict[str, InequalityCheck] = field(default_factory=dict)

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.checks.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            'trace_norm': float(self.trace_norm), 'lower': float(self.lower),
            'upper': float(self.upper), 'beta': float(self.beta), 'all_hold': self.all_hold,
            'checks': {name: c.to_dict() for name, c in self.checks.items()},
        }


class DualNormEstimator:
    """
    Dual norm r_q* by fully corrective column generation over SU(C_q)

    The upper bound is the least sum |c_j| of a decomposition T = sum c_j X_j
    into collected orbit atoms. Each round prices a new atom against the
    master dual iterate G with the q-radius solver: its witness pair (x, y)
    gives the atom x (x) y* maximizing |tr(X G)|. Every iterate also yields
    the lower bound |tr(T G)| / r_q(G).
    """

    def __init__(self, config: Optional[OptimizerConfig] = None,
                 gap_tol: float = defaults.DUAL_GAP_TOL,
                 feas_tol: float = defaults.DUAL_FEAS_TOL,
                 max_rounds: int = defaults.DUAL_MAX_ROUNDS,
                 phase_count: int = defaults.DUAL_PHASE_GRID,
                 max_dimension: int = defaults.DUAL_MAX_DIMENSION,
                 ascent_iters: int = defaults.DUAL_ASCENT_ITERS,
                 ascent_starts: int = defaults.DUAL_ASCENT_STARTS):
        if gap_tol <= 0:
            raise ValidationError(f"gap_tol must be positive, got {gap_tol}")
        if phase_count < 4:
            raise ValidationError(f"phase grid needs at least 4 points, got {phase_count}")
        if ascent_iters < 0 or ascent_starts < 0:
            raise ValidationError("ascent_iters and ascent_starts must be non-negative")
        self.calculator = RadiusCalculator(config)
        self.config = self.calculator.config
        self.gap_tol = gap_tol
        self.feas_tol = feas_tol
        self.max_rounds = max_rounds
        self.phases = phase_grid(phase_count)
        self.max_dimension = max_dimension
        self.ascent_iters = ascent_iters
        self.ascent_starts = ascent_starts
        self.logger = logging.getLogger(__name__)

    def dual_radius(self, T: ComplexMatrix, q: Union[float, QParameter],
                    config: Optional[OptimizerConfig] = None,
                    gap_tol: Optional[float] = None, allow_large: bool = False) -> DualEstimate:
        T = as_matrix(T, "T")
        qp = QParameter.of(q)
        cfg = config or self.config
        gap_tol = self.gap_tol if gap_tol is None else gap_tol
        if gap_tol <= 0:
            raise ValidationError(f"gap_tol must be positive, got {gap_tol}")
        n = T.shape[0]
        if n < 2:
            raise DimensionError("r_q* needs n >= 2")
        if n > self.max_dimension and not allow_large:
            raise DimensionError(f"dual_radius is capped at n <= {self.max_dimension}; pass allow_large for n={n}")

        if not np.any(T):
            return DualEstimate(lower=0.0, upper=0.0, atoms=[], coefficients=[], feasibility_residual=0.0,
                                pairing_witness=np.zeros_like(T), converged=True, iterations=0)

        rng = np.random.default_rng(cfg.seed)
        atoms: List[OrbitElement] = [random_orbit_element(qp, n, rng) for _ in range(n * n + n)]

        # T* pairs with T to ||T||_2^2, the first lower-bound candidate
        best_lower, witness = self._pairing_bound(T, T.conj().T, qp, cfg)
        solution = None
        converged = False
        rounds = 0

        for rounds in range(1, self.max_rounds + 1):
            solution = solve_master([a.matrix for a in atoms], T, self.phases)
            G = solution.dual_matrix
            estimate = self.calculator.q_radius_reduced(G, qp, cfg)
            lower, _ = self._pairing_bound(T, G, qp, cfg, estimate.value)
            if lower > best_lower:
                best_lower, witness = lower, G

            gap = (solution.objective - best_lower) / solution.objective
            self.logger.debug(f"round {rounds}: upper {solution.objective:.8g}, lower {best_lower:.8g}, "
                              f"r_q(G) {estimate.value:.8g}")
            if gap <= gap_tol:
                converged = True
                break
            if estimate.value <= 1.0 + PRICING_TOL:
                self.logger.info(f"no improving atom after {rounds} rounds; gap {gap:.3g}")
                break
            atoms.append(self._priced_atom(G, qp, estimate.witness_x, estimate.witness_y))

        # Independent lower bound: restarted ascent of the pairing quotient,
        # from T* and random starts, plus the best LP iterate if the gap is open
        if self.ascent_iters > 0 and self.ascent_starts > 0:
            starts = [T.conj().T] + [complex_gaussian(rng, (n, n)) for _ in range(self.ascent_starts - 1)]
            if not converged:
                starts.append(witness)
            for A0 in starts:
                lower, A = self.pairing_ascent(T, qp, A0, cfg)
                if lower > best_lower:
                    best_lower, witness = lower, A

        matrices = [a.matrix for a in atoms[:len(solution.coefficients)]]
        coefficients = polish_coefficients(matrices, solution.coefficients, T)
        support, reduced = caratheodory_reduce(matrices, coefficients)
        kept = [atoms[j] for j in support]
        reduced = polish_coefficients([a.matrix for a in kept], reduced, T)
        combined = sum((c * a.matrix for c, a in zip(reduced, kept)), np.zeros_like(T))
        residual = float(np.linalg.norm(combined - T))
        upper = float(np.sum(np.abs(reduced)))
        if residual > self.feas_tol:
            self.logger.warning(f"decomposition residual {residual:.3e} exceeds feas_tol {self.feas_tol:g}")

        result = DualEstimate(
            lower=float(best_lower),
            upper=upper,
            atoms=kept,
            coefficients=[complex(c) for c in reduced],
            feasibility_residual=residual,
            pairing_witness=witness,
            converged=(converged or upper - best_lower <= gap_tol * upper) and residual <= self.feas_tol,
            iterations=rounds,
        )
        if not result.converged:
            self.logger.warning(f"dual_radius stopped with gap {result.gap:.3g} after {rounds} rounds")
        return result

    def pairing_ascent(self, T: ComplexMatrix, q: Union[float, QParameter], start: ComplexMatrix,
                       config: Optional[OptimizerConfig] = None):
        """
        Lower bound max |tr(TA)| / r_q(A) by sphere ascent over A

        The quotient is scale invariant, so A stays on the unit Frobenius
        sphere. r_q(A) is differentiable where its witness pair (x, y) is
        unique, with gradient phase * y x*. Inner radii use a few restarts;
        the returned bound is re-evaluated with the full configuration.
        """
        T = as_matrix(T, "T")
        qp = QParameter.of(q)
        cfg = config or self.config
        inner = cfg.with_restarts(min(cfg.restarts, 4))
        zero = np.zeros_like(T)

        def objective(A: ComplexMatrix):
            estimate = self.calculator.q_radius_reduced(A, qp, inner)
            r_q = estimate.value
            if r_q <= 0.0:
                return 0.0, zero
            pairing = np.sum(T * A.T)
            ph_t = pairing / abs(pairing) if abs(pairing) > 0.0 else 1.0 + 0.0j
            x, y = estimate.witness_x, estimate.witness_y
            v = np.vdot(y, A @ x)
            ph_r = v / abs(v) if abs(v) > 0.0 else 1.0 + 0.0j
            value = abs(pairing) / r_q
            grad = (ph_t * T.conj().T - value * ph_r * np.outer(y, x.conj())) / r_q
            return float(value), grad

        start = as_matrix(start, "start")
        if not np.any(start):
            return 0.0, start
        ascent_cfg = OptimizerConfig(restarts=1, max_iters=self.ascent_iters, step_tol=cfg.step_tol,
                                     grad_tol=cfg.grad_tol, seed=cfg.seed)
        result = manifold_ascent(objective, start / np.linalg.norm(start), ascent_cfg,
                                 sphere_tangent, sphere_retract)
        lower, A = self._pairing_bound(T, result.point, qp, cfg)
        self.logger.debug(f"pairing ascent: {lower:.8g} after {result.iterations} iterations")
        return lower, A

    def _pairing_bound(self, T: ComplexMatrix, G: ComplexMatrix, q: QParameter,
                       cfg: OptimizerConfig, r_q: Optional[float] = None):
        if r_q is None:
            r_q = self.calculator.q_radius_reduced(G, q, cfg).value
        if r_q <= 0.0:
            return 0.0, G
        return float(abs(np.sum(T * G.T)) / r_q), G

    @staticmethod
    def _priced_atom(G: ComplexMatrix, q: QParameter, x: np.ndarray, y: np.ndarray) -> OrbitElement:
        """Phase-aligned atom theta x (x) y* with tr(atom G) = |<Gx, y>|"""
        value = np.vdot(y, G @ x)
        theta = np.conj(value) / abs(value) if abs(value) > 0.0 else 1.0 + 0.0j
        w = None
        if q.p > 0.0:
            w = (y - q.q * x) / q.p
            w = w - np.vdot(x, w) * x
            w = w / np.linalg.norm(w)
        return make_orbit_element(q, x, w, theta)

    def duality_check(self, T: ComplexMatrix, A: ComplexMatrix, q: Union[float, QParameter],
                      config: Optional[OptimizerConfig] = None) -> bool:
        """|tr(TA)| <= r_q*(T) r_q(A) (1 + 1e-3), with the upper estimate of r_q*"""
        T = as_matrix(T, "T")
        A = as_matrix(A, "A")
        require_same_size(T, A)
        qp = QParameter.of(q)
        lhs = abs(np.sum(T * A.T))
        if lhs == 0.0:
            return True
        upper = self.dual_radius(T, qp, config).upper
        r_q = self.calculator.q_radius_reduced(A, qp, config).value
        return bool(lhs <= upper * r_q * (1.0 + DUALITY_SLACK))

    def dual_trace_sandwich(self, T: ComplexMatrix, q: Union[float, QParameter],
                            config: Optional[OptimizerConfig] = None) -> SandwichReport:
        """
        ||T||_1 <= r_q*(T) <= beta(q) ||T||_1, dual to r_q(A) <= ||A|| <= beta r_q(A)

        The left inequality is tested against the lower estimate and the right
        one against the upper estimate. A bracket closed to gap_tol puts each
        estimate within a factor 1 / (1 - gap_tol) of the true value, which is
        the only slack allowed.
        """
        T = as_matrix(T, "T")
        qp = QParameter.of(q)
        estimate = self.dual_radius(T, qp, config)
        trace_norm = schatten_norm(T, 'trace')
        beta = beta_constant(qp)
        grow = 1.0 / (1.0 - min(self.gap_tol, 0.5))
        left = estimate.lower * grow + self.feas_tol
        right = beta * trace_norm * grow + self.feas_tol
        checks = {
            'trace_norm_le_dual': InequalityCheck(bool(trace_norm <= left), trace_norm, left),
            'dual_le_beta_trace_norm': InequalityCheck(bool(estimate.upper <= right), estimate.upper, right),
        }
        return SandwichReport(trace_norm=trace_norm, lower=estimate.lower, upper=estimate.upper,
                              beta=beta, checks=checks)
