import pytest
import numpy as np
import scipy.sparse as sp
from core.factor.sparse_factor import factorize, apply_inverse, elimination_tree
from core.factor.assembly import assemble_global
from core.factor.ordering import fill_reducing_ordering, minimum_degree
from core.factor.delassus import delassus
from core.factor.exceptions import NotPositiveDefiniteError
from core.mesh.hex_grid import build_hex_cells
from core.material.energy_kind import EnergyKind
from core.material.material_field import build_material_field

class TestFactorize:
    def test_diagonal(self):
        factor = factorize(sp.identity(3, format="csr") * 4.0)
        np.testing.assert_allclose(np.abs(factor.s_factor.toarray()), 0.5 * np.eye(3))
        np.testing.assert_allclose((factor.s_transpose @ factor.s_factor).toarray(), 0.25 * np.eye(3))

    def test_two_by_two_matches_dense_inverse(self):
        matrix = np.array([[4.0, 1.0], [1.0, 4.0]])
        factor = factorize(sp.csr_matrix(matrix))
        np.testing.assert_allclose((factor.s_transpose @ factor.s_factor).toarray(), np.linalg.inv(matrix), atol=1e-12)

    def test_indefinite_matrix_raises(self):
        with pytest.raises(NotPositiveDefiniteError, match="pivot"):
            factorize(sp.csr_matrix(np.array([[1.0, 2.0], [2.0, 1.0]])))

    def test_exact_on_assembled_operator(self, grid_mesh, grid_material):
        operator = assemble_global(grid_mesh, grid_material, 0.01)
        factor = factorize(operator)
        rng = np.random.default_rng(0)
        for _ in range(20):
            v = rng.standard_normal(factor.size)
            residual = operator @ factor.apply_inverse(v) - v
            assert np.linalg.norm(residual) <= 1e-9 * np.linalg.norm(v)

    def test_per_axis_application(self, grid_mesh, grid_material):
        operator = assemble_global(grid_mesh, grid_material, 0.01)
        factor = factorize(operator)
        rhs = np.random.default_rng(1).standard_normal((factor.size, 3))
        np.testing.assert_allclose(operator @ apply_inverse(factor, rhs), rhs, atol=1e-8)

    def test_thread_count_does_not_change_factor(self, grid_mesh, grid_material):
        operator = assemble_global(grid_mesh, grid_material, 0.01)
        serial = factorize(operator, workers=1)
        threaded = factorize(operator, workers=4)
        assert (serial.s_factor != threaded.s_factor).nnz == 0

    def test_zero_and_linearity(self, grid_mesh, grid_material):
        factor = factorize(assemble_global(grid_mesh, grid_material, 0.01))
        rng = np.random.default_rng(2)
        a, b = rng.standard_normal(factor.size), rng.standard_normal(factor.size)
        np.testing.assert_array_equal(factor.apply_inverse(np.zeros(factor.size)), 0.0)
        np.testing.assert_allclose(factor.apply_inverse(2 * a - 3 * b),
                                   2 * factor.apply_inverse(a) - 3 * factor.apply_inverse(b), atol=1e-12)

    def test_dimension_mismatch(self):
        factor = factorize(sp.identity(3, format="csr"))
        with pytest.raises(ValueError, match="Dimension mismatch"):
            factor.apply_inverse(np.ones(4))

    def test_multiply_is_counted(self):
        factor = factorize(sp.identity(3, format="csr") * 2.0)
        np.testing.assert_allclose(factor.multiply(np.ones(3)), 2.0)
        assert factor.matvec_count == 1

    def test_diagnostics(self, grid_mesh, grid_material):
        factor = factorize(assemble_global(grid_mesh, grid_material, 0.01), signature="abc")
        n = factor.size
        assert factor.signature == "abc"
        assert factor.nnz_ratio == pytest.approx(factor.s_factor.nnz / n ** 2)
        assert factor.factor_seconds >= 0.0

class TestEliminationTree:
    def test_tridiagonal_is_a_path(self):
        matrix = sp.diags([[-1.0] * 4, [4.0] * 5, [-1.0] * 4], [-1, 0, 1], format="csc")
        parent, counts = elimination_tree(sp.triu(matrix, format="csc"))
        np.testing.assert_array_equal(parent, [1, 2, 3, 4, -1])

class TestOrdering:
    def test_is_a_permutation(self, grid_mesh, grid_material):
        ordering = fill_reducing_ordering(assemble_global(grid_mesh, grid_material, 0.01))
        np.testing.assert_array_equal(np.sort(ordering.permutation), np.arange(grid_mesh.num_vertices))

    def test_large_grid_uses_dissection(self):
        mesh = build_hex_cells((8, 4, 2), 0.05, density=1000.0)
        material = build_material_field(mesh, 1e5, 0.3, EnergyKind.NEO_HOOKEAN)
        ordering = fill_reducing_ordering(assemble_global(mesh, material, 0.01), leaf_size=8)
        assert ordering.method == "nested_dissection"
        np.testing.assert_array_equal(np.sort(ordering.permutation), np.arange(mesh.num_vertices))

    def test_minimum_degree_on_star(self):
        # hub 0 linked to four leaves: leaves go first
        rows = [0, 0, 0, 0]
        cols = [1, 2, 3, 4]
        graph = sp.csr_matrix((np.ones(4), (rows, cols)), shape=(5, 5))
        graph = ((graph + graph.T) > 0).astype(np.int8).tocsr()
        order = minimum_degree(graph)
        assert order[-1] == 0 or order[-2] == 0
        assert sorted(order.tolist()) == list(range(5))

class TestDelassus:
    @pytest.fixture
    def factor(self, grid_mesh, grid_material):
        return factorize(assemble_global(grid_mesh, grid_material, 0.01))

    def test_single_spike_is_inverse_diagonal(self, factor):
        n = factor.size
        jacobian = np.zeros((1, n, 3))
        jacobian[0, 5, 2] = 1.0
        block = delassus(factor, jacobian)
        unit = np.zeros(n)
        unit[5] = 1.0
        assert block.matrix[0, 0] == pytest.approx(factor.apply_inverse(unit)[5], rel=1e-9)

    def test_batched_matches_columnwise(self, factor):
        n = factor.size
        rng = np.random.default_rng(4)
        vertices = rng.choice(n, size=6, replace=False)
        jacobian = np.zeros((6, n, 3))
        directions = rng.standard_normal((6, 3))
        jacobian[np.arange(6), vertices] = directions / np.linalg.norm(directions, axis=1, keepdims=True)

        block = delassus(factor, jacobian)
        for c in range(6):
            column = np.stack([factor.apply_inverse(jacobian[c, :, axis]) for axis in range(3)], axis=1)
            np.testing.assert_allclose(block.columns[c], column, atol=1e-12)
        columnwise = np.einsum('kvi,lvi->kl', jacobian, block.columns)
        np.testing.assert_allclose(block.matrix, columnwise, atol=1e-10)
        assert np.linalg.eigvalsh(block.matrix).min() >= -1e-10 * np.abs(block.matrix).max()

    def test_empty_jacobian(self, factor):
        block = delassus(factor, np.zeros((0, factor.size, 3)))
        assert block.matrix.shape == (0, 0)

    def test_mismatched_jacobian(self, factor):
        with pytest.raises(ValueError, match="spans"):
            delassus(factor, np.zeros((1, factor.size + 1, 3)))
