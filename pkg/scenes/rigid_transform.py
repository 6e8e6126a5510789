from typing import Tuple
import numpy as np

def _axis_rotations(angles) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    a, b, c = (float(x) for x in angles)
    ca, sa, cb, sb, cc, sc = np.cos(a), np.sin(a), np.cos(b), np.sin(b), np.cos(c), np.sin(c)
    rx = np.array([[1.0, 0.0, 0.0], [0.0, ca, -sa], [0.0, sa, ca]])
    ry = np.array([[cb, 0.0, sb], [0.0, 1.0, 0.0], [-sb, 0.0, cb]])
    rz = np.array([[cc, -sc, 0.0], [sc, cc, 0.0], [0.0, 0.0, 1.0]])
    drx = np.array([[0.0, 0.0, 0.0], [0.0, -sa, -ca], [0.0, ca, -sa]])
    dry = np.array([[-sb, 0.0, cb], [0.0, 0.0, 0.0], [-cb, 0.0, -sb]])
    drz = np.array([[-sc, -cc, 0.0], [cc, -sc, 0.0], [0.0, 0.0, 0.0]])
    return rx, ry, rz, drx, dry, drz

def euler_matrix(angles) -> np.ndarray:
    """Rotation for XYZ Euler angles applied about fixed axes: R = Rz Ry Rx."""
    rx, ry, rz, _, _, _ = _axis_rotations(angles)
    return rz @ ry @ rx

def euler_derivatives(angles) -> np.ndarray:
    """dR/d(angle_k) stacked as (3, 3, 3), k first."""
    rx, ry, rz, drx, dry, drz = _axis_rotations(angles)
    return np.stack([rz @ ry @ drx, rz @ dry @ rx, drz @ ry @ rx])

def centroid(positions: np.ndarray, masses: np.ndarray) -> np.ndarray:
    return masses @ positions / masses.sum()

def rigid_transform(positions: np.ndarray, masses: np.ndarray, translation, angles) -> np.ndarray:
    """Rotates about the mass centroid, then translates."""
    center = centroid(positions, masses)
    return center + (positions - center) @ euler_matrix(angles).T + np.asarray(translation, dtype=float)
