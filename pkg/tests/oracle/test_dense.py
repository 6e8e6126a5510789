import pytest
import numpy as np
import scipy.sparse as sp
from core.factor.exceptions import NotPositiveDefiniteError
from core.oracle.dense import dense_inverse, dense_operator

class TestDenseInverse:
    def test_identity(self):
        np.testing.assert_array_equal(dense_inverse(np.eye(4)), np.eye(4))

    def test_diagonal(self):
        np.testing.assert_allclose(dense_inverse(4.0 * np.eye(3)), 0.25 * np.eye(3))

    def test_random_spd(self):
        rng = np.random.default_rng(0)
        root = rng.standard_normal((12, 12))
        matrix = root @ root.T + 12.0 * np.eye(12)
        np.testing.assert_allclose(dense_inverse(matrix) @ matrix, np.eye(12), atol=1e-12)

    def test_non_square_raises(self):
        with pytest.raises(ValueError, match="square"):
            dense_inverse(np.ones((2, 3)))

    def test_size_limit(self):
        with pytest.raises(ValueError, match="limited"):
            dense_inverse(np.eye(501))

    def test_indefinite_raises(self):
        with pytest.raises(NotPositiveDefiniteError, match="not positive definite"):
            dense_inverse(np.diag([1.0, -2.0, 3.0]))

class TestDenseOperator:
    def test_expands_each_entry_to_a_diagonal_block(self):
        block = sp.csr_matrix(np.array([[2.0, -1.0], [-1.0, 3.0]]))
        operator = dense_operator(block)

        assert operator.shape == (6, 6)
        np.testing.assert_array_equal(operator[0:3, 3:6], -np.eye(3))
        np.testing.assert_array_equal(operator[3:6, 3:6], 3.0 * np.eye(3))

    def test_matches_axis_wise_product(self):
        block = np.array([[4.0, 1.0], [1.0, 5.0]])
        field = np.array([[1.0, 2.0, 3.0], [-1.0, 0.5, 2.0]])
        np.testing.assert_allclose(dense_operator(block) @ field.ravel(), (block @ field).ravel())
