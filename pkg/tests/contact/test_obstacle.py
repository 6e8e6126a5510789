import pytest
import numpy as np
from core.contact.obstacle import Obstacle, ObstacleKind, obstacle_from_dict
from core.contact.exceptions import InvalidObstacleError

class TestObstacle:
    def test_half_space_normal_is_normalized(self):
        floor = Obstacle.half_space([0.0, 2.0, 0.0], offset=1.0, friction=0.5)
        np.testing.assert_allclose(floor.normal, [0.0, 1.0, 0.0])
        assert floor.kind == ObstacleKind.HALFSPACE

    def test_half_space_signed_distance(self):
        floor = Obstacle.half_space([0.0, 0.0, 1.0], offset=0.5)
        distances, normals = floor.signed_distance([[0.0, 0.0, 1.0], [1.0, 1.0, 0.25]])
        np.testing.assert_allclose(distances, [0.5, -0.25])
        np.testing.assert_allclose(normals, [[0.0, 0.0, 1.0], [0.0, 0.0, 1.0]])

    def test_sphere_normal_points_away_from_center(self):
        ball = Obstacle.sphere([0.0, 0.0, 0.0], 1.0)
        distances, normals = ball.signed_distance([[0.0, 0.5, 0.0], [3.0, 0.0, 0.0]])
        np.testing.assert_allclose(distances, [-0.5, 2.0])
        np.testing.assert_allclose(normals, [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])

    def test_sphere_center_uses_fallback_normal(self):
        ball = Obstacle.sphere([1.0, 1.0, 1.0], 0.5)
        _, normals = ball.signed_distance([[1.0, 1.0, 1.0]])
        np.testing.assert_allclose(normals, [[0.0, 0.0, 1.0]])

    @pytest.mark.parametrize("factory, message", [
        (lambda: Obstacle.half_space([0.0, 0.0, 0.0]), "non-zero"),
        (lambda: Obstacle.half_space([0.0, 0.0, 1.0], friction=-0.1), "Friction"),
        (lambda: Obstacle.sphere([0.0, 0.0, 0.0], 0.0), "radius"),
        (lambda: Obstacle.sphere([0.0, 0.0], 1.0), "3-vector"),
    ])
    def test_invalid_obstacles_raise(self, factory, message):
        with pytest.raises(InvalidObstacleError, match=message):
            factory()

class TestObstacleFromDict:
    def test_half_space(self):
        obstacle = obstacle_from_dict({"type": "halfspace", "normal": [0, 1, 0], "offset": 0, "friction": 0.5})
        assert obstacle.kind == ObstacleKind.HALFSPACE
        assert obstacle.friction == 0.5

    def test_sphere(self):
        obstacle = obstacle_from_dict({"type": "sphere", "center": [0, 0, 0], "radius": 0.2})
        assert obstacle.kind == ObstacleKind.SPHERE
        assert obstacle.radius == 0.2
        assert obstacle.friction == 0.0

    def test_unknown_type(self):
        with pytest.raises(ValueError, match="Invalid obstacle type: 'plane'"):
            obstacle_from_dict({"type": "plane"})
