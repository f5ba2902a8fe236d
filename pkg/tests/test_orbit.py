import unittest

import numpy as np
from hypothesis import given, seed, settings, strategies as st

from qnumrange.linalg import dyad, hs_norm, is_unitary
from qnumrange.linalg.sampling import complex_gaussian, haar_unitary, orthogonal_unit_vector, unit_vector
from qnumrange.orbit import (
    build_cq, canonicalize, decompose_rank_one, is_in_orbit, make_orbit_element, orbit_element_from_dict,
    orbit_element_from_matrix, orbit_element_to_dict, random_orbit_element, rank_one_decomposition_span,
    rank_two_decomposition_span,
)
from qnumrange.utils.exceptions import DimensionError, DomainError, ValidationError


def _reconstruct(theta, U, q):
    return theta * (U.conj().T @ build_cq(q, U.shape[0]) @ U)


class TestOrbitMembership(unittest.TestCase):
    """Test cases for SU(C_q) membership and canonical forms"""

    def setUp(self):
        self.rng = np.random.default_rng(31)

    def test_build_cq(self):
        C = build_cq(0.6, 3)
        self.assertEqual(C[0, 0], 0.6)
        self.assertAlmostEqual(C[0, 1].real, 0.8)
        self.assertEqual(np.count_nonzero(C), 2)
        self.assertTrue(is_in_orbit(C, 0.6))
        with self.assertRaises(DimensionError):
            build_cq(0.5, 1)

    def test_unitary_similarity_stays_in_orbit(self):
        for q in (0.2, 0.6, 1.0):
            U = haar_unitary(4, self.rng)
            X = np.exp(0.7j) * (U.conj().T @ build_cq(q, 4) @ U)
            membership = is_in_orbit(X, q)
            self.assertTrue(membership)
            self.assertEqual(membership.rank, 1)
            self.assertAlmostEqual(membership.trace_modulus, q)

    def test_violators(self):
        q = 0.6
        X = random_orbit_element(q, 3, self.rng)
        a = orthogonal_unit_vector(X.x, self.rng)
        b = orthogonal_unit_vector(X.y, self.rng)
        rank_two = X.matrix + 0.5 * dyad(a, b)
        self.assertFalse(is_in_orbit(rank_two, q))
        self.assertEqual(is_in_orbit(rank_two, q).rank, 2)
        w = orthogonal_unit_vector(X.x, self.rng)
        wrong_trace = dyad(X.x, 0.8 * X.x + 0.6 * w)
        self.assertFalse(is_in_orbit(wrong_trace, q))
        self.assertFalse(is_in_orbit(1.5 * X.matrix, q))
        self.assertFalse(is_in_orbit(np.zeros((3, 3)), q))

    @settings(max_examples=30)
    @seed(20244)
    @given(st.integers(0, 2 ** 31 - 1), st.integers(2, 5), st.floats(0.05, 1.0))
    def test_canonicalize_round_trip(self, sample_seed, n, q):
        X = random_orbit_element(q, n, np.random.default_rng(sample_seed))
        theta, U = canonicalize(X.matrix, q)
        self.assertAlmostEqual(abs(theta), 1.0, places=12)
        self.assertTrue(is_unitary(U, tol=1e-9))
        self.assertLessEqual(hs_norm(X.matrix - _reconstruct(theta, U, q)), 1e-8)

    def test_canonical_phase_convention(self):
        X = random_orbit_element(0.4, 3, self.rng)
        _, U = canonicalize(X.matrix, 0.4)
        lead = U.ravel(order='F')[np.flatnonzero(np.abs(U.ravel(order='F')) > 1e-10)[0]]
        self.assertAlmostEqual(lead.imag, 0.0, places=12)
        self.assertGreater(lead.real, 0.0)

    def test_canonicalize_of_cq(self):
        theta, U = canonicalize(build_cq(0.6, 3), 0.6)
        self.assertAlmostEqual(theta, 1.0)
        np.testing.assert_allclose(U, np.eye(3), atol=1e-12)

    def test_canonicalize_rejects_non_members(self):
        with self.assertRaises(DomainError):
            canonicalize(np.eye(3), 0.5)


class TestOrbitElements(unittest.TestCase):
    """Test cases for OrbitElement construction and JSON"""

    def setUp(self):
        self.rng = np.random.default_rng(41)

    def test_make_orbit_element(self):
        x = unit_vector(3, self.rng)
        w = orthogonal_unit_vector(x, self.rng)
        theta = np.exp(0.3j)
        e = make_orbit_element(0.6, x, w, theta)
        np.testing.assert_allclose(e.matrix, theta * dyad(x, 0.6 * x + 0.8 * w), atol=1e-14)
        self.assertAlmostEqual(np.trace(e.matrix), theta * 0.6)
        self.assertLessEqual(hs_norm(e.matrix - _reconstruct(e.canonical_phase, e.canonical_unitary, 0.6)), 1e-10)
        self.assertEqual(e.n, 3)

    def test_q_one_ignores_w(self):
        x = unit_vector(2, self.rng)
        e = make_orbit_element(1.0, x, None)
        np.testing.assert_allclose(e.matrix, dyad(x, x))

    def test_make_validates(self):
        x = unit_vector(3, self.rng)
        with self.assertRaises(ValidationError):
            make_orbit_element(0.6, x, None)
        with self.assertRaises(ValidationError):
            make_orbit_element(0.6, 2 * x, orthogonal_unit_vector(x, self.rng))
        with self.assertRaises(ValidationError):
            make_orbit_element(0.6, x, x)
        with self.assertRaises(ValidationError):
            make_orbit_element(0.6, x, orthogonal_unit_vector(x, self.rng), theta=2.0)
        with self.assertRaises(DimensionError):
            make_orbit_element(0.6, x, np.array([0, 1]))

    def test_from_matrix_certificate(self):
        X = random_orbit_element(0.3, 4, self.rng).matrix
        e = orbit_element_from_matrix(X, 0.3)
        np.testing.assert_allclose(e.phase * dyad(e.x, e.y), X, atol=1e-10)
        self.assertAlmostEqual(np.vdot(e.y, e.x), 0.3)

    def test_json(self):
        e = random_orbit_element(0.5, 3, self.rng)
        payload = orbit_element_to_dict(e)
        self.assertEqual(set(payload), {'matrix', 'x', 'y', 'phase', 'theta', 'U'})
        restored = orbit_element_from_dict(payload)
        np.testing.assert_array_equal(restored.matrix, e.matrix)
        with self.assertRaises(ValidationError):
            orbit_element_from_dict({'matrix': payload['matrix']})


class TestDecomposition(unittest.TestCase):
    """Test cases for splitting rank-one matrices into orbit members"""

    def setUp(self):
        self.rng = np.random.default_rng(51)

    def _rank_one(self, n, norm):
        return norm * dyad(unit_vector(n, self.rng), unit_vector(n, self.rng))

    def test_decomposition(self):
        for _ in range(10):
            n = int(self.rng.integers(3, 6))
            q = float(self.rng.uniform(0.2, 0.95))
            bound = min(2 * q, 2 * np.sqrt(1 - q * q))
            R = self._rank_one(n, 0.95 * bound * self.rng.uniform(0.05, 1.0))
            a, b = decompose_rank_one(R, q)
            self.assertTrue(is_in_orbit(a.matrix, q))
            self.assertTrue(is_in_orbit(b.matrix, q))
            self.assertLessEqual(hs_norm(a.matrix + b.matrix - R), 1e-10)

    def test_parameters(self):
        R = self._rank_one(4, 0.5)
        a0, _ = decompose_rank_one(R, 0.6, t=0.0, k=3)
        a1, b1 = decompose_rank_one(R, 0.6, t=1.0, k=4, p_prime=0.79)
        self.assertGreater(hs_norm(a0.matrix - a1.matrix), 1e-6)
        self.assertTrue(is_in_orbit(a1.matrix, 0.6) and is_in_orbit(b1.matrix, 0.6))

    def test_small_norm(self):
        a, b = decompose_rank_one(self._rank_one(3, 1e-3), 0.5)
        self.assertTrue(is_in_orbit(a.matrix, 0.5) and is_in_orbit(b.matrix, 0.5))

    def test_preconditions(self):
        R = self._rank_one(3, 0.5)
        with self.assertRaises(DomainError):
            decompose_rank_one(R, 1.0)
        with self.assertRaises(DomainError):
            decompose_rank_one(self._rank_one(3, 1.3), 0.6)
        with self.assertRaises(DomainError):
            decompose_rank_one(np.diag([0.1, 0.1, 0.0]), 0.6)
        with self.assertRaises(ValidationError):
            decompose_rank_one(R, 0.6, k=2)
        with self.assertRaises(DimensionError):
            decompose_rank_one(R, 0.6, k=4)
        with self.assertRaises(DimensionError):
            decompose_rank_one(self._rank_one(2, 0.5), 0.6)
        with self.assertRaises(ValidationError):
            decompose_rank_one(R, 0.6, p_prime=0.9)


class TestSpans(unittest.TestCase):
    """Test cases for sampled decomposition spans"""

    def test_rank_one_span(self):
        rng = np.random.default_rng(61)
        n = 4
        R = 0.4 * dyad(unit_vector(n, rng), unit_vector(n, rng))
        report = rank_one_decomposition_span(R, 0.6, samples=80, seed=3)
        self.assertEqual(report.expected_dimension, 4 * n - 2)
        self.assertLessEqual(report.dimension, 4 * n - 2)
        self.assertLessEqual(report.containment_residual, 1e-10)
        self.assertEqual(report.samples, 160)

    def test_rank_two_span(self):
        rng = np.random.default_rng(62)
        R = complex_gaussian(rng, (4, 2)) @ complex_gaussian(rng, (2, 4))
        report = rank_two_decomposition_span(R, samples=60, seed=1)
        self.assertLessEqual(report.dimension, 7)
        self.assertEqual(report.expected_dimension, 7)
        self.assertLessEqual(report.containment_residual, 1e-8)
        self.assertEqual(report.to_dict()['samples'], 60)

    def test_rank_two_requires_rank_two(self):
        with self.assertRaises(DomainError):
            rank_two_decomposition_span(np.eye(3), samples=5)


if __name__ == '__main__':
    unittest.main()
