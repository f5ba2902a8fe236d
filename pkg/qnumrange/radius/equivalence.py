import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Union

import numpy as np

from qnumrange.linalg.operations import hs_norm, numerical_rank, schatten_norm
from qnumrange.linalg.types import ComplexMatrix, QParameter, as_matrix
from qnumrange.radius.optimizer import OptimizerConfig
from qnumrange.radius.radius_calculator import RadiusCalculator
from qnumrange.utils.exceptions import DomainError, ValidationError


def beta_constant(q: Union[float, QParameter]) -> float:
    """Constant beta(q) with ||A|| <= beta * r_q(A)"""
    qp = QParameter.of(q)
    p = qp.p
    if p >= 0.5:
        return max(1.0 / p, 1.0 / qp.q)
    if p >= 0.25:
        return float(np.sqrt(5.0 - 4.0 * p) / qp.q)
    return 2.0 / qp.q


@dataclass
class InequalityCheck:
    """lhs <= rhs, where rhs already includes the optimizer slack"""
    holds: bool
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def to_dict(self) -> Dict[str, Any]:
        return {'holds': bool(self.holds), 'lhs': float(self.lhs),
                'rhs': float(self.rhs), 'slack': float(self.slack)}


@dataclass
class EquivalenceReport:
    """r, r_q, ||A|| and the inequality chain linking them"""
    r: float
    r_q: float
    op_norm: float
    q: float
    beta: float
    checks: Dict[str, InequalityCheck] = field(default_factory=dict)

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.checks.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            'r': float(self.r), 'r_q': float(self.r_q), 'op_norm': float(self.op_norm),
            'q': float(self.q), 'beta': float(self.beta), 'all_hold': self.all_hold,
            'checks': {name: c.to_dict() for name, c in self.checks.items()},
        }


class EquivalenceChecker:
    """
    Checks q r(A) <= r_q(A) <= ||A|| <= beta r_q(A) and r(A) <= ||A|| <= 2 r(A)

    r and r_q come from the optimizer and are lower bounds, so slack is added
    only where an underestimate could produce a false violation: `tol` is
    additive, `rel_tol` multiplies the right-hand sides that contain r or r_q.
    """

    def __init__(self, config: Optional[OptimizerConfig] = None,
                 tol: float = 1e-6, rel_tol: float = 1e-3):
        self.calculator = RadiusCalculator(config)
        self.tol = tol
        self.rel_tol = rel_tol
        self.logger = logging.getLogger(__name__)

    def check_equivalence(self, A: ComplexMatrix, q: Union[float, QParameter],
                          config: Optional[OptimizerConfig] = None) -> EquivalenceReport:
        A = as_matrix(A, "A")
        qp = QParameter.of(q)
        r = self.calculator.numerical_radius(A, config).value
        r_q = self.calculator.q_radius_reduced(A, qp, config).value
        op_norm = schatten_norm(A, 'operator')
        beta = beta_constant(qp)
        grow = 1.0 + self.rel_tol

        checks = {
            'q_r_le_r_q': self._check(qp.q * r, r_q * grow + self.tol),
            'r_q_le_norm': self._check(r_q, op_norm + self.tol),
            'norm_le_beta_r_q': self._check(op_norm, beta * r_q * grow + self.tol),
            'half_q_norm_le_r_q': self._check(0.5 * qp.q * op_norm, r_q * grow + self.tol),
            'r_le_norm': self._check(r, op_norm + self.tol),
            'norm_le_2r': self._check(op_norm, 2.0 * r * grow + self.tol),
        }
        report = EquivalenceReport(r=r, r_q=r_q, op_norm=op_norm, q=qp.q, beta=beta, checks=checks)
        if not report.all_hold:
            failed = [name for name, c in checks.items() if not c.holds]
            self.logger.warning(f"Equivalence violated for q={qp.q:g}: {failed}")
        return report

    @staticmethod
    def _check(lhs: float, rhs: float) -> InequalityCheck:
        return InequalityCheck(holds=bool(lhs <= rhs), lhs=float(lhs), rhs=float(rhs))


def rank_k_lipschitz(T: ComplexMatrix, S: ComplexMatrix, k: int, tol: float = 1e-12) -> Dict[str, InequalityCheck]:
    """
    ||T - S||_2 <= ||T - S||_1 <= sqrt(2k) ||T - S||_2 for T, S of rank <= k

    T - S has rank at most 2k, which gives the right-hand constant. `tol`
    is relative to ||T - S||_1.
    """
    T = as_matrix(T, "T")
    S = as_matrix(S, "S")
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    for name, M in (("T", T), ("S", S)):
        rank = numerical_rank(M)
        if rank > k:
            raise DomainError(f"{name} has rank {rank} > k = {k}")
    D = T - S
    hs = hs_norm(D)
    trace = schatten_norm(D, 'trace')
    slack = tol * max(1.0, trace)
    return {
        'hs_le_trace': EquivalenceChecker._check(hs, trace + slack),
        'trace_le_sqrt_2k_hs': EquivalenceChecker._check(trace, np.sqrt(2 * k) * hs + slack),
    }
