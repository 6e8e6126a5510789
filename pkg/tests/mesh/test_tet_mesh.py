import pytest
import numpy as np
from core.mesh.tet_mesh import build_tet_mesh, element_operator, element_dofs
from core.mesh.kinematics import deformation_gradients, scatter_element_matrices, element_laplacians
from core.mesh.mesh_loader import mesh_from_dict
from core.mesh.exceptions import DegenerateElementError, InvalidMeshError

UNIT_TET = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]

class TestBuildTetMesh:
    @pytest.fixture
    def unit_tet(self):
        return build_tet_mesh(UNIT_TET, [[0, 1, 2, 3]], density=6.0)

    def test_unit_tet_volume_and_mass(self, unit_tet):
        assert unit_tet.rest_volume[0] == pytest.approx(1.0 / 6.0)
        np.testing.assert_allclose(unit_tet.vertex_mass, 0.25)
        np.testing.assert_allclose(unit_tet.lumped_mass, 0.25)
        assert unit_tet.lumped_mass.shape == (12,)

    def test_mass_sums_to_density_times_volume(self, two_tet_mesh):
        total = two_tet_mesh.vertex_mass.sum()
        assert total == pytest.approx(two_tet_mesh.density * two_tet_mesh.total_volume, rel=1e-10)

    def test_shared_vertices_accumulate_mass(self, two_tet_mesh):
        quarters = two_tet_mesh.density * two_tet_mesh.rest_volume / 4.0
        assert two_tet_mesh.vertex_mass[0] == pytest.approx(quarters[0])
        assert two_tet_mesh.vertex_mass[1] == pytest.approx(quarters.sum())
        assert two_tet_mesh.vertex_mass[4] == pytest.approx(quarters[1])

    def test_inverted_element_is_rejected(self):
        with pytest.raises(DegenerateElementError, match="element 0"):
            build_tet_mesh(UNIT_TET, [[0, 2, 1, 3]], density=1.0)

    def test_flat_element_is_rejected(self):
        flat = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]]
        with pytest.raises(DegenerateElementError):
            build_tet_mesh(flat, [[0, 1, 2, 3]], density=1.0)

    def test_out_of_range_index_is_rejected(self):
        with pytest.raises(InvalidMeshError, match="Element indices"):
            build_tet_mesh(UNIT_TET, [[0, 1, 2, 4]], density=1.0)

    def test_empty_mesh_is_rejected(self):
        with pytest.raises(InvalidMeshError, match="at least one element"):
            build_tet_mesh(UNIT_TET, np.zeros((0, 4), dtype=int), density=1.0)

    def test_arrays_are_read_only(self, unit_tet):
        with pytest.raises(ValueError):
            unit_tet.rest_positions[0, 0] = 1.0

    def test_boundary_of_two_tets_excludes_shared_face(self, two_tet_mesh):
        triangles = two_tet_mesh.boundary_triangles()
        assert triangles.shape == (6, 3)
        keys = {tuple(sorted(t)) for t in triangles.tolist()}
        assert (1, 2, 3) not in keys
        np.testing.assert_array_equal(two_tet_mesh.boundary_vertices(), np.arange(5))

class TestElementOperator:
    def test_rest_configuration_gives_identity(self, two_tet_mesh):
        q = two_tet_mesh.rest_positions.ravel()
        for e in range(two_tet_mesh.num_elements):
            op = element_operator(two_tet_mesh, e)
            np.testing.assert_allclose(op.matrix @ q[op.dofs], np.eye(3).ravel(), atol=1e-12)

    def test_uniform_scaling(self, two_tet_mesh):
        q = 2.0 * two_tet_mesh.rest_positions.ravel()
        op = element_operator(two_tet_mesh, 1)
        np.testing.assert_allclose(op.matrix @ q[op.dofs], 2.0 * np.eye(3).ravel(), atol=1e-12)

    def test_matches_batched_deformation_gradients(self, two_tet_mesh):
        rng = np.random.default_rng(3)
        q = two_tet_mesh.rest_positions + 0.01 * rng.standard_normal((5, 3))
        batched = deformation_gradients(two_tet_mesh, q)
        for e in range(two_tet_mesh.num_elements):
            op = element_operator(two_tet_mesh, e)
            np.testing.assert_allclose(op.matrix @ q.ravel()[op.dofs], batched[e].ravel(), atol=1e-12)

    def test_out_of_range_element(self, two_tet_mesh):
        with pytest.raises(IndexError):
            element_operator(two_tet_mesh, 2)

    def test_element_dofs_shape(self, two_tet_mesh):
        rows, cols = element_dofs(two_tet_mesh)
        assert rows.shape == (2, 12, 12)
        np.testing.assert_array_equal(rows[0, :, 0], cols[0, 0, :])

class TestKinematics:
    def test_scatter_is_transpose_of_gather(self, two_tet_mesh):
        rng = np.random.default_rng(7)
        q = rng.standard_normal((5, 3))
        tensors = rng.standard_normal((2, 3, 3))
        lhs = np.sum(deformation_gradients(two_tet_mesh, q) * tensors)
        rhs = np.sum(q * scatter_element_matrices(two_tet_mesh, tensors))
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_laplacian_rows_sum_to_zero(self, two_tet_mesh):
        np.testing.assert_allclose(element_laplacians(two_tet_mesh).sum(axis=2), 0.0, atol=1e-9)

class TestMeshFromDict:
    def test_explicit_vertices(self):
        mesh = mesh_from_dict({"vertices": UNIT_TET, "elements": [[0, 1, 2, 3]]}, density=1.0)
        assert mesh.num_elements == 1

    def test_grid_shorthand(self):
        mesh = mesh_from_dict({"grid": {"dims": [1, 1, 1], "spacing": 1.0}}, density=1.0)
        assert mesh.num_elements == 6

    def test_missing_sections(self):
        with pytest.raises(InvalidMeshError, match="'grid'"):
            mesh_from_dict({"vertices": UNIT_TET}, density=1.0)
