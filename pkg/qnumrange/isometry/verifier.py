import logging
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Union

import numpy as np
from joblib import Parallel, delayed

from qnumrange import config as defaults
from qnumrange.isometry.descriptor import IsometryDescriptor
from qnumrange.linalg.matrix_io import matrix_to_json
from qnumrange.linalg.operations import dagger, dyad, numerical_rank
from qnumrange.linalg.sampling import complex_gaussian, unit_vector
from qnumrange.linalg.types import ComplexMatrix, DaggerMode, QParameter, as_matrix
from qnumrange.orbit.saturated_orbit import is_in_orbit, random_orbit_element
from qnumrange.radius.optimizer import OptimizerConfig
from qnumrange.radius.radius_calculator import RadiusCalculator
from qnumrange.utils.exceptions import DimensionError, ValidationError

logger = logging.getLogger(__name__)

ISOMETRY_TOL = 1e-3
DAGGER_SPREAD_TOL = 1e-4
# Denominator floor for relative defects
DEFECT_FLOOR = 1e-12

# Deterministic size-preserving map on n x n complex matrices
BlackBoxMap = Callable[[ComplexMatrix], ComplexMatrix]


class CountingMap:
    """
    Black-box map wrapper that counts evaluations

    single_threaded=True tells harnesses not to evaluate it concurrently.
    """

    def __init__(self, func: BlackBoxMap, single_threaded: bool = False):
        self.func = func
        self.single_threaded = single_threaded
        self.calls = 0
        self._lock = threading.Lock()

    def __call__(self, A: ComplexMatrix) -> ComplexMatrix:
        with self._lock:
            self.calls += 1
        return self.func(A)


def evaluate(f: BlackBoxMap, A: ComplexMatrix) -> ComplexMatrix:
    """f(A), checked to be a finite matrix of the same size"""
    out = as_matrix(f(A), "map output")
    if out.shape != A.shape:
        raise DimensionError(f"map changed the size: {A.shape} -> {out.shape}")
    return out


@dataclass
class TrialRecord:
    r_q_input: float
    r_q_output: float
    defect: float

    def to_dict(self) -> Dict[str, Any]:
        return {'r_q_input': float(self.r_q_input), 'r_q_output': float(self.r_q_output),
                'defect': float(self.defect)}


@dataclass
class IsometryReport:
    """Per-trial r_q(f(A) - f(B)) against r_q(A - B)"""
    passed: bool
    max_defect: float
    tolerance: float
    trials: List[TrialRecord] = field(default_factory=list)
    worst_pair: Optional[Dict[str, Any]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'passed': bool(self.passed),
            'max_defect': float(self.max_defect),
            'tolerance': float(self.tolerance),
            'trials': [t.to_dict() for t in self.trials],
            'worst_pair': self.worst_pair,
        }


@dataclass
class DaggerInvarianceReport:
    values: Dict[str, float]
    spread: float
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {'values': {k: float(v) for k, v in self.values.items()},
                'spread': float(self.spread), 'passed': bool(self.passed)}


@dataclass
class OrbitPreservationReport:
    """Whether psi = phi - S0 maps SU(C_q) into SU(C_q) and rank one to rank one"""
    passed: bool
    orbit_failures: int
    rank_failures: int
    count: int

    def to_dict(self) -> Dict[str, Any]:
        return {'passed': bool(self.passed), 'orbit_failures': int(self.orbit_failures),
                'rank_failures': int(self.rank_failures), 'count': int(self.count)}


class IsometryVerifier:
    """Numerical checks around maps preserving the q-numerical radius"""

    def __init__(self, config: Optional[OptimizerConfig] = None):
        self.calculator = RadiusCalculator(config)
        self.config = self.calculator.config
        self.logger = logging.getLogger(__name__)

    def verify_isometry(self, f: BlackBoxMap, q: Union[float, QParameter], trials: int,
                        seed: int, n: int, config: Optional[OptimizerConfig] = None,
                        tol: float = ISOMETRY_TOL) -> IsometryReport:
        """
        Relative defect |r_q(f(A) - f(B)) - r_q(A - B)| / r_q(A - B) over random pairs

        Trial i draws A and B from seed ^ i. Trials run on joblib threads
        unless the map declares itself single-threaded.
        """
        qp = QParameter.of(q)
        if trials < 1:
            raise ValidationError(f"trials must be >= 1, got {trials}")
        if n < 2 and qp.p > 0.0:
            raise DimensionError("q < 1 needs n >= 2")
        cfg = config or self.config

        def trial(i: int):
            rng = np.random.default_rng(int(seed) ^ i)
            A = complex_gaussian(rng, (n, n))
            B = complex_gaussian(rng, (n, n))
            r_in = self.calculator.q_radius_reduced(A - B, qp, cfg).value
            r_out = self.calculator.q_radius_reduced(evaluate(f, A) - evaluate(f, B), qp, cfg).value
            defect = abs(r_out - r_in) / max(r_in, DEFECT_FLOOR)
            return TrialRecord(r_q_input=r_in, r_q_output=r_out, defect=defect), A, B

        serial = getattr(f, 'single_threaded', False) or cfg.threads <= 1 or trials == 1
        if serial:
            outcomes = [trial(i) for i in range(trials)]
        else:
            outcomes = Parallel(n_jobs=min(cfg.threads, trials), prefer="threads")(
                delayed(trial)(i) for i in range(trials)
            )

        records = [o[0] for o in outcomes]
        worst = int(np.argmax([r.defect for r in records]))
        max_defect = records[worst].defect
        passed = bool(max_defect <= tol)
        worst_pair = None
        if not passed:
            _, A, B = outcomes[worst]
            worst_pair = {'trial': worst, 'A': matrix_to_json(A), 'B': matrix_to_json(B)}
            self.logger.info(f"isometry check failed: defect {max_defect:.3e} at trial {worst}")
        return IsometryReport(passed=passed, max_defect=max_defect, tolerance=tol,
                              trials=records, worst_pair=worst_pair)

    def dagger_invariance_check(self, A: ComplexMatrix, q: Union[float, QParameter],
                                config: Optional[OptimizerConfig] = None,
                                tol: float = DAGGER_SPREAD_TOL) -> DaggerInvarianceReport:
        """r_q(A), r_q(A^t), r_q(A*) and r_q(conj A) with their relative spread"""
        A = as_matrix(A, "A")
        qp = QParameter.of(q)
        cfg = config or self.config
        values = {
            mode.value: self.calculator.q_radius_reduced(dagger(A, mode), qp, cfg).value
            for mode in DaggerMode
        }
        top = max(values.values())
        spread = (top - min(values.values())) / max(top, DEFECT_FLOOR)
        return DaggerInvarianceReport(values=values, spread=spread, passed=bool(spread <= tol))

    @staticmethod
    def orbit_preservation_check(d: IsometryDescriptor, q: Union[float, QParameter],
                                 count: int, seed: int) -> OrbitPreservationReport:
        qp = QParameter.of(q)
        if count < 1:
            raise ValidationError(f"count must be >= 1, got {count}")
        rng = np.random.default_rng(seed)
        orbit_failures = 0
        rank_failures = 0
        for _ in range(count):
            X = random_orbit_element(qp, d.n, rng).matrix
            if not is_in_orbit(d.linear_part(X), qp, defaults.ORBIT_TOL):
                orbit_failures += 1
            R = dyad(complex_gaussian(rng, d.n), unit_vector(d.n, rng))
            if numerical_rank(d.linear_part(R), defaults.RANK_TOL) != 1:
                rank_failures += 1
        return OrbitPreservationReport(passed=orbit_failures == 0 and rank_failures == 0,
                                       orbit_failures=orbit_failures, rank_failures=rank_failures,
                                       count=count)
