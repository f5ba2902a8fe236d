import unittest

import numpy as np
from hypothesis import given, seed, strategies as st

from qnumrange.linalg import (
    DaggerMode, QParameter, SampleKind, as_matrix, dagger, dyad, extend_to_unitary, hs_norm, inner,
    is_unitary, matrix_from_json, matrix_to_json, matrix_unit, numerical_rank, pairing, sample,
    schatten_norm, vector_from_json, vector_to_json,
)
from qnumrange.linalg.sampling import complex_gaussian, orthogonal_unit_vector, unit_vector
from qnumrange.utils.exceptions import DimensionError, ValidationError

modes = st.sampled_from(list(DaggerMode))


class TestQParameter(unittest.TestCase):
    """Test cases for QParameter"""

    def test_p_is_complementary(self):
        qp = QParameter(0.6)
        self.assertAlmostEqual(qp.p, 0.8, places=15)
        self.assertEqual(QParameter(1.0).p, 0.0)

    def test_rejects_out_of_range(self):
        for bad in (0.0, -0.1, 1.0000001, float('nan'), float('inf'), "abc"):
            with self.assertRaises(ValidationError):
                QParameter(bad)

    def test_of_passes_instances_through(self):
        qp = QParameter(0.3)
        self.assertIs(QParameter.of(qp), qp)
        self.assertEqual(QParameter.of(0.3), qp)


class TestDaggerModes(unittest.TestCase):
    """Test cases for the four dagger symmetries"""

    def setUp(self):
        self.A = complex_gaussian(np.random.default_rng(1), (3, 3))

    def test_modes(self):
        np.testing.assert_array_equal(dagger(self.A, 'identity'), self.A)
        np.testing.assert_array_equal(dagger(self.A, 'transpose'), self.A.T)
        np.testing.assert_array_equal(dagger(self.A, 'adjoint'), self.A.conj().T)
        np.testing.assert_array_equal(dagger(self.A, 'conjugate'), self.A.conj())

    def test_flags(self):
        self.assertTrue(DaggerMode.IDENTITY.is_linear and DaggerMode.IDENTITY.is_multiplicative)
        self.assertFalse(DaggerMode.ADJOINT.is_linear or DaggerMode.ADJOINT.is_multiplicative)
        self.assertTrue(DaggerMode.TRANSPOSE.is_linear)
        self.assertFalse(DaggerMode.TRANSPOSE.is_multiplicative)
        self.assertFalse(DaggerMode.CONJUGATE.is_linear)

    @seed(20240)
    @given(modes, modes)
    def test_compose_matches_application(self, outer, inner_mode):
        expected = dagger(dagger(self.A, inner_mode), outer)
        np.testing.assert_array_equal(dagger(self.A, outer.compose(inner_mode)), expected)

    @seed(20241)
    @given(modes)
    def test_every_mode_is_an_involution(self, mode):
        self.assertIs(mode.compose(mode), DaggerMode.IDENTITY)
        np.testing.assert_array_equal(dagger(dagger(self.A, mode), mode), self.A)

    def test_unknown_mode(self):
        with self.assertRaises(ValueError):
            dagger(self.A, 'inverse')


class TestOperations(unittest.TestCase):
    """Test cases for pairings, norms and completions"""

    def setUp(self):
        self.rng = np.random.default_rng(7)

    def test_inner_is_linear_in_first_argument(self):
        x = complex_gaussian(self.rng, 3)
        y = complex_gaussian(self.rng, 3)
        self.assertAlmostEqual(inner(2j * x, y), 2j * inner(x, y))
        self.assertAlmostEqual(inner(x, 2j * y), -2j * inner(x, y))

    def test_dyad_trace_identities(self):
        x = complex_gaussian(self.rng, 4)
        y = complex_gaussian(self.rng, 4)
        A = complex_gaussian(self.rng, (4, 4))
        self.assertAlmostEqual(np.trace(dyad(x, y)), inner(x, y))
        self.assertAlmostEqual(np.trace(dyad(x, y) @ A), inner(A @ x, y))

    def test_pairing_is_trace_of_product(self):
        C = complex_gaussian(self.rng, (3, 3))
        T = complex_gaussian(self.rng, (3, 3))
        self.assertAlmostEqual(pairing(C, T), np.trace(C @ T))
        with self.assertRaises(DimensionError):
            pairing(C, np.eye(2))

    def test_matrix_unit(self):
        E = matrix_unit(3, 0, 2)
        self.assertEqual(E[0, 2], 1.0)
        self.assertEqual(np.count_nonzero(E), 1)
        with self.assertRaises(DimensionError):
            matrix_unit(3, 3, 0)

    @seed(20242)
    @given(st.integers(0, 2 ** 31 - 1), st.integers(1, 6))
    def test_schatten_ordering(self, sample_seed, n):
        A = complex_gaussian(np.random.default_rng(sample_seed), (n, n))
        op = schatten_norm(A, 'operator')
        hs = schatten_norm(A, 'hilbert_schmidt')
        tr = schatten_norm(A, 'trace')
        slack = 1e-12 * tr
        self.assertLessEqual(op, hs + slack)
        self.assertLessEqual(hs, tr + slack)
        self.assertLessEqual(tr, np.sqrt(n) * hs + slack)
        self.assertAlmostEqual(hs, hs_norm(A), places=10)

    def test_numerical_rank(self):
        self.assertEqual(numerical_rank(np.zeros((3, 3))), 0)
        self.assertEqual(numerical_rank(sample('rank_k', 5, 3, k=2)), 2)
        self.assertEqual(numerical_rank(np.eye(4)), 4)
        with self.assertRaises(ValidationError):
            numerical_rank(np.eye(2), tol=0.0)

    def test_extend_to_unitary(self):
        x = unit_vector(4, self.rng)
        w = orthogonal_unit_vector(x, self.rng)
        U = extend_to_unitary([x, w])
        self.assertTrue(is_unitary(U))
        np.testing.assert_allclose(U[:, 0], x)
        np.testing.assert_allclose(U[:, 1], w)

    def test_standard_basis_completes_to_identity(self):
        e1 = np.eye(3)[0]
        np.testing.assert_allclose(extend_to_unitary([e1]), np.eye(3))

    def test_extend_rejects_non_orthonormal(self):
        with self.assertRaises(ValidationError):
            extend_to_unitary([np.array([1.0, 1.0])])
        with self.assertRaises(DimensionError):
            extend_to_unitary([np.eye(2)[0], np.eye(2)[1], np.eye(2)[0]])


class TestSampling(unittest.TestCase):
    """Test cases for seeded samplers"""

    def test_deterministic(self):
        for kind in SampleKind:
            k = 2 if kind is SampleKind.RANK_K else None
            np.testing.assert_array_equal(sample(kind, 4, 11, k), sample(kind, 4, 11, k))

    def test_kinds(self):
        self.assertAlmostEqual(np.linalg.norm(sample('unit_vector', 5, 0)), 1.0)
        self.assertTrue(is_unitary(sample('unitary', 5, 0)))
        self.assertEqual(sample('dense', 3, 0).shape, (3, 3))

    def test_rank_k_needs_valid_k(self):
        with self.assertRaises(ValidationError):
            sample('rank_k', 3, 0)
        with self.assertRaises(DimensionError):
            sample('rank_k', 3, 0, k=4)

    def test_orthogonal_unit_vector_needs_room(self):
        with self.assertRaises(DimensionError):
            orthogonal_unit_vector(np.array([1.0 + 0j]), np.random.default_rng(0))


class TestMatrixJson(unittest.TestCase):
    """Test cases for the matrix JSON format"""

    def test_round_trip(self):
        A = np.array([[1 + 2j, -0.5], [0, 3j]])
        payload = matrix_to_json(A)
        self.assertEqual(payload['rows'], 2)
        self.assertEqual(payload['data'][0], [1.0, 2.0])
        np.testing.assert_array_equal(matrix_from_json(payload), A)

    def test_vector_round_trip(self):
        x = np.array([1j, 2.0, -1.0])
        np.testing.assert_array_equal(vector_from_json(vector_to_json(x)), x)

    def test_rejects_malformed(self):
        with self.assertRaises(ValidationError):
            matrix_from_json([[1, 0]])
        with self.assertRaises(ValidationError):
            matrix_from_json({'rows': 2, 'cols': 2, 'data': [[1, 0]]})
        with self.assertRaises(ValidationError):
            matrix_from_json({'rows': 1, 'cols': 1, 'data': [[float('nan'), 0]]})
        with self.assertRaises(ValidationError):
            matrix_from_json({'rows': 1, 'cols': 1, 'data': [["a", 0]]})

    def test_as_matrix_rejects_non_square_and_non_finite(self):
        with self.assertRaises(DimensionError):
            as_matrix(np.zeros((2, 3)))
        with self.assertRaises(ValidationError):
            as_matrix([[np.inf]])


if __name__ == '__main__':
    unittest.main()
