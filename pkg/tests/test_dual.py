import unittest
from unittest import mock

import numpy as np

from qnumrange.dual import (
    DualNormEstimator, caratheodory_reduce, phase_grid, polish_coefficients, solve_master,
)
from qnumrange.linalg import matrix_unit, schatten_norm
from qnumrange.linalg.sampling import complex_gaussian
from qnumrange.orbit import build_cq, is_in_orbit, random_orbit_element
from qnumrange.radius import OptimizerConfig, beta_constant
from qnumrange.utils.exceptions import DimensionError, ValidationError


class TestAtomicMaster(unittest.TestCase):
    """Test cases for the LP master problem and support reduction"""

    def test_phase_grid(self):
        grid = phase_grid(4)
        np.testing.assert_allclose(grid, [1, 1j, -1, -1j], atol=1e-15)

    def test_diagonal_master(self):
        atoms = [matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)]
        T = np.diag([2.0, 1j])
        solution = solve_master(atoms, T, phase_grid(4))
        self.assertAlmostEqual(solution.objective, 3.0, places=8)
        np.testing.assert_allclose(solution.coefficients, [2.0, 1j], atol=1e-8)
        self.assertLess(solution.residual, 1e-8)
        # every column obeys Re tr(G phase atom) <= 1
        for X in atoms:
            for ph in phase_grid(4):
                self.assertLessEqual(np.real(np.trace(solution.dual_matrix @ (ph * X))), 1.0 + 1e-8)

    def test_polish(self):
        atoms = [matrix_unit(2, 0, 0), matrix_unit(2, 0, 1)]
        T = 0.5 * atoms[0] + 0.25j * atoms[1]
        polished = polish_coefficients(atoms, np.array([0.5 + 1e-6, 0.25j]), T)
        np.testing.assert_allclose(polished, [0.5, 0.25j], atol=1e-14)
        np.testing.assert_array_equal(polish_coefficients(atoms, np.zeros(2, dtype=complex), T), np.zeros(2))

    def test_caratheodory_keeps_sum_and_weight(self):
        rng = np.random.default_rng(5)
        atoms = [complex_gaussian(rng, (1, 1)) for _ in range(8)]
        coefficients = rng.uniform(0.1, 1.0, 8) * np.exp(1j * rng.uniform(0, 2 * np.pi, 8))
        support, reduced = caratheodory_reduce(atoms, coefficients)
        self.assertLessEqual(len(support), 3)
        before = sum(c * a for c, a in zip(coefficients, atoms))
        after = sum(c * atoms[j] for c, j in zip(reduced, support))
        np.testing.assert_allclose(after, before, atol=1e-10)
        self.assertAlmostEqual(np.sum(np.abs(reduced)), np.sum(np.abs(coefficients)), places=10)

    def test_caratheodory_empty(self):
        support, reduced = caratheodory_reduce([np.eye(2)], np.zeros(1, dtype=complex))
        self.assertEqual(support, [])
        self.assertEqual(reduced.size, 0)


class TestDualNorm(unittest.TestCase):
    """Test cases for the two-sided r_q* estimate"""

    def setUp(self):
        self.estimator = DualNormEstimator(OptimizerConfig(restarts=6, seed=3))
        self.rng = np.random.default_rng(71)

    def test_orbit_member_has_unit_dual_norm(self):
        for q in (0.3, 0.6, 1.0):
            estimate = self.estimator.dual_radius(build_cq(q, 2), q)
            self.assertGreaterEqual(estimate.lower, 0.98)
            self.assertLessEqual(estimate.upper, 1.0 / (1.0 - 0.02) + 1e-9)
            X = random_orbit_element(q, 2, self.rng).matrix
            estimate = self.estimator.dual_radius(X, q)
            self.assertGreaterEqual(estimate.lower, 0.98)
            self.assertLessEqual(estimate.upper, 1.0 / (1.0 - 0.02) + 1e-9)

    def test_random_matrix_closes_gap(self):
        for _ in range(2):
            T = complex_gaussian(self.rng, (2, 2))
            estimate = self.estimator.dual_radius(T, 0.6)
            self.assertTrue(estimate.converged)
            self.assertLessEqual(estimate.gap, 0.02)
            self.assertLessEqual(estimate.lower, estimate.upper * (1 + 1e-9))

    def test_decomposition_certificate(self):
        T = complex_gaussian(self.rng, (2, 2))
        q = 0.5
        estimate = self.estimator.dual_radius(T, q)
        combined = sum(c * a.matrix for c, a in zip(estimate.coefficients, estimate.atoms))
        self.assertLessEqual(np.linalg.norm(combined - T), 1e-8)
        self.assertAlmostEqual(estimate.upper, float(np.sum(np.abs(estimate.coefficients))), places=12)
        self.assertLessEqual(len(estimate.atoms), 2 * 2 * 2 + 1)
        for atom in estimate.atoms:
            self.assertTrue(is_in_orbit(atom.matrix, q))

    def test_zero_matrix(self):
        estimate = self.estimator.dual_radius(np.zeros((3, 3)), 0.4)
        self.assertEqual((estimate.lower, estimate.upper), (0.0, 0.0))
        self.assertTrue(estimate.converged)
        self.assertEqual(estimate.atoms, [])
        self.assertEqual(estimate.gap, 0.0)

    def test_dimension_cap(self):
        with self.assertRaises(DimensionError):
            self.estimator.dual_radius(np.zeros((5, 5)), 0.5)
        with self.assertRaises(DimensionError):
            self.estimator.dual_radius(np.eye(1), 0.5)
        estimate = self.estimator.dual_radius(np.zeros((5, 5)), 0.5, allow_large=True)
        self.assertEqual(estimate.upper, 0.0)

    def test_gap_tol_validation(self):
        with self.assertRaises(ValidationError):
            DualNormEstimator(gap_tol=0.0)
        with self.assertRaises(ValidationError):
            self.estimator.dual_radius(np.eye(2), 0.5, gap_tol=-1.0)

    def test_trace_sandwich(self):
        T = complex_gaussian(self.rng, (2, 2))
        report = self.estimator.dual_trace_sandwich(T, 0.7)
        self.assertTrue(report.all_hold, report.to_dict())
        self.assertAlmostEqual(report.trace_norm, schatten_norm(T, 'trace'))
        self.assertAlmostEqual(report.beta, beta_constant(0.7))

    def test_duality_check(self):
        T = complex_gaussian(self.rng, (2, 2))
        A = complex_gaussian(self.rng, (2, 2))
        self.assertTrue(self.estimator.duality_check(T, A, 0.6))
        self.assertTrue(self.estimator.duality_check(np.zeros((2, 2)), A, 0.6))
        with self.assertRaises(DimensionError):
            self.estimator.duality_check(T, np.eye(3), 0.6)

    def test_identity_sandwich_is_strict(self):
        q = 0.6
        report = self.estimator.dual_trace_sandwich(np.eye(2), q)
        self.assertTrue(report.all_hold, report.to_dict())
        self.assertAlmostEqual(report.trace_norm, 2.0)
        left = report.checks['trace_norm_le_dual']
        right = report.checks['dual_le_beta_trace_norm']
        self.assertEqual(left.lhs, report.trace_norm)
        self.assertAlmostEqual(left.rhs, report.lower / (1.0 - 0.02) + 1e-8)
        self.assertEqual(right.lhs, report.upper)
        self.assertLessEqual(report.upper, beta_constant(q) * 2.0 / (1.0 - 0.02) + 1e-8)

    def test_sandwich_flags_a_loose_bracket(self):
        T = complex_gaussian(self.rng, (2, 2))
        with mock.patch.object(self.estimator, 'dual_radius') as dual_radius:
            dual_radius.return_value = mock.Mock(lower=0.5 * schatten_norm(T, 'trace'), upper=1e3)
            report = self.estimator.dual_trace_sandwich(T, 0.6)
        self.assertFalse(report.checks['trace_norm_le_dual'].holds)
        self.assertFalse(report.checks['dual_le_beta_trace_norm'].holds)

    def test_circled_and_homogeneous(self):
        T = complex_gaussian(self.rng, (2, 2))
        q = 0.6
        base = self.estimator.dual_radius(T, q)
        for factor in (np.exp(1.3j), 2.5, 0.4 * np.exp(-2.0j)):
            scaled = self.estimator.dual_radius(factor * T, q)
            self.assertLessEqual(abs(scaled.upper / (abs(factor) * base.upper) - 1.0), 0.021)
            self.assertLessEqual(abs(scaled.lower / (abs(factor) * base.lower) - 1.0), 0.021)

    def test_triangle_inequality(self):
        q = 0.5
        T = complex_gaussian(self.rng, (2, 2))
        S = complex_gaussian(self.rng, (2, 2))
        total = self.estimator.dual_radius(T + S, q)
        parts = self.estimator.dual_radius(T, q).upper + self.estimator.dual_radius(S, q).upper
        self.assertLessEqual(total.lower, parts * (1 + 1e-9))
        self.assertLessEqual(total.upper, parts / (1.0 - 0.02))

    def test_duality_is_attained_on_the_witness(self):
        T = complex_gaussian(self.rng, (2, 2))
        q = 0.6
        estimate = self.estimator.dual_radius(T, q)
        A = estimate.pairing_witness
        r_q = self.estimator.calculator.q_radius_reduced(A, q).value
        quotient = abs(np.trace(T @ A)) / r_q
        self.assertGreaterEqual(quotient, (1.0 - 0.02) * estimate.upper)
        self.assertLessEqual(quotient, estimate.upper * (1 + 1e-6))
        self.assertTrue(self.estimator.duality_check(T, A, q))
        self.assertTrue(self.estimator.duality_check(T, np.eye(2), q))

    def test_pairing_ascent_raises_the_lower_bound(self):
        T = complex_gaussian(self.rng, (2, 2))
        q = 0.6
        plain = DualNormEstimator(OptimizerConfig(restarts=6, seed=3), ascent_iters=0).dual_radius(T, q)
        ascended = self.estimator.dual_radius(T, q)
        self.assertGreaterEqual(ascended.lower, plain.lower)
        self.assertEqual(ascended.upper, plain.upper)
        start = complex_gaussian(np.random.default_rng(4), (2, 2))
        r_q = self.estimator.calculator.q_radius_reduced(start, q).value
        lower, A = self.estimator.pairing_ascent(T, q, start)
        self.assertGreaterEqual(lower, abs(np.trace(T @ start)) / r_q - 1e-9)
        self.assertLessEqual(lower, ascended.upper * (1 + 1e-6))
        self.assertAlmostEqual(np.linalg.norm(A), 1.0, delta=1e-12)

    def test_ascent_settings_validation(self):
        with self.assertRaises(ValidationError):
            DualNormEstimator(ascent_iters=-1)
        self.assertEqual(DualNormEstimator().ascent_starts, 2)

    def test_serializes(self):
        payload = self.estimator.dual_radius(build_cq(0.6, 2), 0.6).to_dict()
        for key in ('lower', 'upper', 'gap', 'converged', 'iterations', 'atoms', 'coefficients',
                    'pairing_witness', 'feasibility_residual'):
            self.assertIn(key, payload)
        self.assertEqual(len(payload['atoms']), len(payload['coefficients']))


if __name__ == '__main__':
    unittest.main()
