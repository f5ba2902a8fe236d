"""
Seeded acceptance suite behind `qnr selftest`

The default run uses reduced trial counts; --full uses the stated ones.
Each check yields one row of the pass/fail table. Nothing here reads the
clock, so two runs with the same seed give identical reports.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from qnumrange.cradius import CRadiusCalculator
from qnumrange.dual import DualNormEstimator
from qnumrange.isometry import IsometryRecovery, IsometryVerifier, apply, random_descriptor
from qnumrange.linalg import (
    DaggerMode, complex_gaussian, dyad, hs_norm, orthogonal_unit_vector, unit_vector,
)
from qnumrange.oracle import GridSpec, brute_c_radius_2x2, brute_q_radius_2x2
from qnumrange.orbit import (
    build_cq, canonicalize, decompose_rank_one, is_in_orbit, random_orbit_element, rank_two_decomposition_span,
)
from qnumrange.radius import EquivalenceChecker, OptimizerConfig, RadiusCalculator, rank_k_lipschitz
from qnumrange.storage import dumps
from qnumrange.utils import DomainError, ValidationError

Q_GRID = (0.1, 0.25, 0.5, 0.6, 0.9, 1.0)


@dataclass
class CheckRow:
    group: str
    criterion: Optional[int]
    name: str
    passed: bool
    trials: int
    worst: float
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {'group': self.group, 'criterion': self.criterion, 'name': self.name,
                'passed': bool(self.passed), 'trials': int(self.trials),
                'worst': float(self.worst), 'detail': self.detail}


class SelfTestSuite:
    def __init__(self, seed: int = 0, full: bool = False, threads: int = 1):
        self.seed = int(seed)
        self.full = full
        self.cfg = OptimizerConfig(restarts=32 if full else 8, seed=self.seed, threads=threads)
        self.c_cfg = OptimizerConfig(restarts=64 if full else 16, seed=self.seed, threads=threads)
        self.radius = RadiusCalculator(self.cfg)
        self.c_radius = CRadiusCalculator(self.c_cfg)
        self.logger = logging.getLogger(__name__)

    def _count(self, reduced: int, full: int) -> int:
        return full if self.full else reduced

    def _rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])

    def run(self) -> Dict[str, Any]:
        checks: List[Callable[[], CheckRow]] = [
            self.oracle_q_radius, self.oracle_c_radius,
            self.identity_radius, self.jordan_cell, self.three_methods, self.inequalities,
            self.orbit_characterization, self.rank_one_decomposition, self.rank_k_lipschitz,
            self.dual_bounds, self.isometry_classification, self.norm_certificate,
            self.rank_two_span, self.determinism,
        ]
        rows = []
        for check in checks:
            try:
                row = check()
            except (ValidationError, DomainError) as e:
                row = CheckRow('error', None, check.__name__, False, 0, float('inf'), str(e))
            self.logger.info(f"{row.name}: {'pass' if row.passed else 'FAIL'} (worst {row.worst:.3e})")
            rows.append(row.to_dict())
        passed = all(r['passed'] for r in rows)
        return {'seed': self.seed, 'full': self.full, 'passed': passed, 'checks': rows}

    # ------------------------------------------------------------ oracles

    def oracle_q_radius(self) -> CheckRow:
        """Optimizer against the 2x2 grid search, and monotonicity along nested grids"""
        rng = self._rng(101)
        count = self._count(4, 50)
        worst = 0.0
        ok = True
        for _ in range(count):
            A = complex_gaussian(rng, (2, 2))
            for q in (0.2, 0.6, 1.0):
                oracle = brute_q_radius_2x2(A, q, GridSpec(64))
                value = self.radius.q_radius_reduced(A, q).value
                worst = max(worst, abs(value - oracle.value) / oracle.error_bound)
                coarse = [brute_q_radius_2x2(A, q, GridSpec(d)).value for d in (16, 32)]
                # nested grids share points; the slack absorbs vectorized libm rounding
                ok = ok and coarse[0] <= coarse[1] + 1e-12 and coarse[1] <= oracle.value + 1e-12
        return CheckRow('oracle', None, 'oracle_q_radius', ok and worst <= 3.0, count * 3, worst,
                        "|r_q - oracle| / grid error bound")

    def oracle_c_radius(self) -> CheckRow:
        rng = self._rng(102)
        count = self._count(3, 20)
        worst = 0.0
        for _ in range(count):
            A = complex_gaussian(rng, (2, 2))
            C = complex_gaussian(rng, (2, 2))
            oracle = brute_c_radius_2x2(A, C, GridSpec(32))
            value = self.c_radius.c_radius(A, C).value
            worst = max(worst, abs(value - oracle.value) / oracle.error_bound)
        return CheckRow('oracle', None, 'oracle_c_radius', worst <= 3.0, count, worst,
                        "|r_C - oracle| / grid error bound")

    # --------------------------------------------------------- acceptance

    def identity_radius(self) -> CheckRow:
        sizes = range(2, 9) if self.full else range(2, 5)
        worst = max(abs(self.radius.q_radius_reduced(np.eye(n), q).value - q) for n in sizes for q in Q_GRID)
        return CheckRow('acceptance', 1, 'identity_radius', worst <= 1e-8, len(sizes) * len(Q_GRID), worst)

    def jordan_cell(self) -> CheckRow:
        E12 = np.array([[0, 1], [0, 0]], dtype=np.complex128)
        worst = 0.0
        oracle_ok = True
        for q in Q_GRID:
            expected = 0.5 * (1.0 + np.sqrt(1.0 - q * q))
            worst = max(worst, abs(self.radius.q_radius_reduced(E12, q).value - expected))
            oracle = brute_q_radius_2x2(E12, q)
            oracle_ok = oracle_ok and abs(oracle.value - expected) <= oracle.error_bound
        return CheckRow('acceptance', 2, 'jordan_cell', worst <= 1e-6 and oracle_ok, len(Q_GRID), worst)

    def three_methods(self) -> CheckRow:
        rng = self._rng(3)
        count = self._count(3, 200)
        worst = 0.0
        for _ in range(count):
            A = complex_gaussian(rng, (3, 3))
            for q in (0.3, 0.7, 1.0):
                reduced = self.radius.q_radius_reduced(A, q).value
                direct = self.radius.q_radius_direct(A, q).value
                via_c = self.c_radius.c_radius(A, build_cq(q, 3)).value
                spread = (max(reduced, direct, via_c) - min(reduced, direct, via_c)) / reduced
                worst = max(worst, spread)
        return CheckRow('acceptance', 3, 'three_methods', worst <= 1e-4, count * 3, worst,
                        "relative spread of reduced, direct and C_q")

    def inequalities(self) -> CheckRow:
        rng = self._rng(4)
        count = self._count(20, 1000)
        checker = EquivalenceChecker(self.cfg)
        violations = 0
        for _ in range(count):
            n = int(rng.integers(2, 6))
            q = float(rng.uniform(0.05, 1.0))
            if not checker.check_equivalence(complex_gaussian(rng, (n, n)), q).all_hold:
                violations += 1
        return CheckRow('acceptance', 4, 'inequalities', violations == 0, count, violations, "violations")

    def orbit_characterization(self) -> CheckRow:
        rng = self._rng(5)
        count = self._count(30, 1000)
        worst = 0.0
        failures = 0
        for i in range(count):
            n = int(rng.integers(2, 6))
            q = float(rng.uniform(0.05, 1.0))
            e = random_orbit_element(q, n, rng)
            if not is_in_orbit(e.matrix, q):
                failures += 1
            theta, U = canonicalize(e.matrix, q)
            worst = max(worst, hs_norm(e.matrix - theta * (U.conj().T @ build_cq(q, n) @ U)))

            kind = i % 3
            if kind == 0:
                # rank two: add a block orthogonal to both x and y
                a = orthogonal_unit_vector(e.x, rng)
                b = orthogonal_unit_vector(e.y, rng)
                violator = e.matrix + 0.5 * dyad(a, b)
            elif kind == 1:
                q_bad = q + 0.2 if q <= 0.7 else q - 0.2
                w = orthogonal_unit_vector(e.x, rng)
                violator = dyad(e.x, q_bad * e.x + np.sqrt(1.0 - q_bad ** 2) * w)
            else:
                violator = 1.5 * e.matrix
            if is_in_orbit(violator, q):
                failures += 1
        passed = failures == 0 and worst <= 1e-8
        return CheckRow('acceptance', 5, 'orbit_characterization', passed, 2 * count, worst,
                        f"{failures} misclassified; worst canonical residual")

    def rank_one_decomposition(self) -> CheckRow:
        rng = self._rng(6)
        count = self._count(10, 100)
        worst = 0.0
        failures = 0
        for _ in range(count):
            n = int(rng.integers(3, 6))
            q = float(rng.uniform(0.2, 0.95))
            bound = min(2.0 * q, 2.0 * np.sqrt(1.0 - q * q))
            R = 0.95 * bound * rng.uniform(0.05, 1.0) * dyad(unit_vector(n, rng), unit_vector(n, rng))
            a, b = decompose_rank_one(R, q)
            worst = max(worst, hs_norm(a.matrix + b.matrix - R))
            if not (is_in_orbit(a.matrix, q) and is_in_orbit(b.matrix, q)):
                failures += 1
        return CheckRow('acceptance', 6, 'rank_one_decomposition', failures == 0 and worst <= 1e-10,
                        count, worst, f"{failures} summands outside the orbit; worst sum residual")

    def rank_k_lipschitz(self) -> CheckRow:
        rng = self._rng(7)
        count = self._count(100, 1000)
        violations = 0
        for _ in range(count):
            n = int(rng.integers(2, 9))
            k = int(rng.integers(1, min(3, n) + 1))
            T = complex_gaussian(rng, (n, k)) @ complex_gaussian(rng, (k, n))
            S = complex_gaussian(rng, (n, k)) @ complex_gaussian(rng, (k, n))
            if not all(c.holds for c in rank_k_lipschitz(T, S, k).values()):
                violations += 1
        return CheckRow('acceptance', 7, 'rank_k_lipschitz', violations == 0, count, violations, "violations")

    def dual_bounds(self) -> CheckRow:
        rng = self._rng(8)
        estimator = DualNormEstimator(self.cfg)
        worst_gap = 0.0
        failures = 0
        trials = 0
        for n, count in ((2, self._count(3, 50)), (3, self._count(1, 20))):
            for _ in range(count):
                q = float(rng.uniform(0.2, 1.0))
                T = complex_gaussian(rng, (n, n))
                estimate = estimator.dual_radius(T, q)
                worst_gap = max(worst_gap, estimate.gap)
                sandwich = estimator.dual_trace_sandwich(T, q)
                if not (estimate.converged and sandwich.all_hold):
                    failures += 1
                trials += 1
        for _ in range(self._count(3, 100)):
            q = float(rng.uniform(0.2, 1.0))
            X = random_orbit_element(q, 2, rng).matrix
            estimate = estimator.dual_radius(X, q)
            if not (estimate.lower >= 0.98 and estimate.upper <= 1.02):
                failures += 1
            trials += 1
        return CheckRow('acceptance', 8, 'dual_bounds', failures == 0 and worst_gap <= 0.02, trials, worst_gap,
                        f"{failures} failures; worst relative gap")

    def isometry_classification(self) -> CheckRow:
        q = 0.6
        verifier = IsometryVerifier(self.cfg)
        recovery = IsometryRecovery(self.seed)
        modes = list(DaggerMode)
        failures = 0
        worst = 0.0

        count = self._count(4, 100)
        for i in range(count):
            d = random_descriptor(3, self.seed + i, modes[i % len(modes)])
            report = verifier.verify_isometry(d.as_map(), q, 3, self.seed + i, d.n)
            worst = max(worst, report.max_defect)
            if not report.passed:
                failures += 1
            scaled = verifier.verify_isometry(lambda A, d=d: 2.0 * apply(d, A), q, 3, self.seed + i, d.n)
            if scaled.passed:
                failures += 1

        recovered_worst = 0.0
        for i in range(self._count(4, 100)):
            n = 2 + i % 3
            d = random_descriptor(n, self.seed + 1000 + i, modes[i % len(modes)])
            report = recovery.recover(d.as_map(), q, n)
            recovered_worst = max(recovered_worst, report.validation_residual)

        rng = self._rng(9)
        spread_worst = 0.0
        for _ in range(self._count(5, 200)):
            n = int(rng.integers(2, 5))
            spread_worst = max(spread_worst,
                               verifier.dagger_invariance_check(complex_gaussian(rng, (n, n)), q).spread)

        passed = failures == 0 and recovered_worst <= 1e-8 and spread_worst <= 1e-4
        return CheckRow('acceptance', 9, 'isometry_classification', passed, count, worst,
                        f"{failures} failures; recovery residual {recovered_worst:.3e}; "
                        f"dagger spread {spread_worst:.3e}; worst isometry defect")

    def norm_certificate(self) -> CheckRow:
        rng = self._rng(10)
        calculator = CRadiusCalculator(OptimizerConfig(restarts=2, seed=self.seed))
        ok = all(calculator.norm_certificate(build_cq(q, 3)).is_norm for q in Q_GRID)
        ok = ok and not calculator.norm_certificate((0.3 - 0.4j) * np.eye(3)).is_norm
        ok = ok and not calculator.norm_certificate(np.array([[0, 1], [0, 0]], dtype=np.complex128)).is_norm

        worst = 0.0
        for _ in range(self._count(3, 20)):
            A = complex_gaussian(rng, (3, 3))
            C = complex_gaussian(rng, (3, 3))
            lam = complex(complex_gaussian(rng, 1)[0])
            worst = max(worst, abs(calculator.c_radius(A, lam * np.eye(3)).value - abs(lam * np.trace(A))))
            worst = max(worst, abs(calculator.c_radius(np.eye(3), C).value - abs(np.trace(C))))
        return CheckRow('acceptance', 10, 'norm_certificate', ok and worst <= 1e-8, 2 * self._count(3, 20), worst)

    def rank_two_span(self) -> CheckRow:
        rng = self._rng(11)
        R = complex_gaussian(rng, (4, 2)) @ complex_gaussian(rng, (2, 4))
        report = rank_two_decomposition_span(R, self._count(60, 200), self.seed)
        return CheckRow('acceptance', 11, 'rank_two_span', report.dimension <= 7, report.samples,
                        float(report.dimension), "numerical real dimension")

    def determinism(self) -> CheckRow:
        """Same seed, same bytes: a radius estimate and a recovery, each computed twice"""
        def snapshot() -> str:
            rng = self._rng(12)
            A = complex_gaussian(rng, (3, 3))
            estimate = RadiusCalculator(self.cfg).q_radius_reduced(A, 0.6)
            d = random_descriptor(3, self.seed)
            report = IsometryRecovery(self.seed).recover(d.as_map(), 0.6, 3)
            return dumps({'estimate': estimate.to_dict(), 'recovery': report.to_dict()})

        identical = snapshot() == snapshot()
        return CheckRow('acceptance', 12, 'determinism', identical, 2, 0.0 if identical else 1.0)
