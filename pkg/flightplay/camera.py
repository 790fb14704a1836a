"""
Camera posture and the world-to-window transformation chain.

Conventions:

- Elemental rotations act about the local east (x), north (y) and up (z)
  axes of the LSR frame. Heading is positive clockwise from north, so it
  enters as a negative rotation about up. This is the only place the sign
  is decided.
- With the identity posture the camera axes equal the LSR axes and the
  camera looks along its -z axis, i.e. straight down with north at the top
  of the image.
- Matrices are stored row-major for column vectors. The row-vector chain
  ``WorldCoord * VM * PM * WM`` is evaluated as its transpose,
  ``WM @ PM @ VM @ p``.
"""

import math
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from flightplay.exceptions import DomainError, ProjectionError
from flightplay.models import EcefPoint, Posture

ROTATION_TOLERANCE = 1e-10
MIN_CLIP_W = 1e-12


def rot_x(angle_deg: float) -> np.ndarray:
    a = math.radians(angle_deg)
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(angle_deg: float) -> np.ndarray:
    a = math.radians(angle_deg)
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(angle_deg: float) -> np.ndarray:
    a = math.radians(angle_deg)
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def is_rotation(m: np.ndarray, tolerance: float = ROTATION_TOLERANCE) -> bool:
    """True when m is orthonormal with determinant +1 within tolerance"""
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3) or not np.all(np.isfinite(m)):
        return False
    if not np.allclose(m.T @ m, np.eye(3), rtol=0.0, atol=tolerance):
        return False
    return abs(np.linalg.det(m) - 1.0) <= tolerance


def rotation_from_posture(p: Posture) -> np.ndarray:
    """Rz(heading) * Ry(pitch) * Rx(roll), heading clockwise from north"""
    return rot_z(-p.heading) @ rot_y(p.pitch) @ rot_x(p.roll)


def rotation_in_lsr(r: np.ndarray, lsr: np.ndarray) -> np.ndarray:
    """
    Express a local posture rotation in ECEF.

    The product ``RotateMatrix * LsrMatrix`` is taken in row-vector form;
    for the column-vector matrices used here that equals ``lsr @ r``, whose
    columns are the camera axes in ECEF.
    """
    r = np.asarray(r, dtype=float)
    lsr = np.asarray(lsr, dtype=float)
    return (r.T @ lsr.T).T


class CameraPose(BaseModel):
    """Camera orientation (axes in ECEF as columns) and eye position"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    rotation_lsr: np.ndarray
    eye: EcefPoint

    @field_validator('rotation_lsr', mode='before')
    @classmethod
    def validate_rotation(cls, v):
        v = np.array(v, dtype=float)
        if not is_rotation(v):
            raise ValueError('rotation_lsr must be a proper rotation')
        v.setflags(write=False)
        return v

    def camera_to_world(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.rotation_lsr
        m[:3, 3] = self.eye.as_tuple()
        return m


def view_matrix_of(pose: CameraPose) -> np.ndarray:
    """
    Rigid inverse of the camera-to-world transform.

    Rotation block is R^T and translation is -R^T @ eye, so the eye maps
    to the view-space origin.
    """
    rt = pose.rotation_lsr.T
    eye = np.array(pose.eye.as_tuple())
    vm = np.eye(4)
    vm[:3, :3] = rt
    vm[:3, 3] = -(rt @ eye)
    return vm


def make_fixed_pm_wm(
    fov_y_deg: float = 60.0,
    aspect: float = 16.0 / 9.0,
    near: float = 1.0,
    far: float = 1e8,
    width_px: int = 1920,
    height_px: int = 1080,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Perspective projection and window matrices.

    The projection maps the view frustum (camera looking down -z) to clip
    space with NDC in [-1, 1]; the window matrix maps NDC to pixels with
    the origin at the top-left corner and depth to [0, 1].

    Raises:
        DomainError: For an invalid frustum or window
    """
    if not (0.0 < fov_y_deg < 180.0):
        raise DomainError("Field of view must be in (0, 180)", {'fov_y_deg': fov_y_deg})
    if aspect <= 0.0:
        raise DomainError("Aspect ratio must be positive", {'aspect': aspect})
    if near <= 0.0 or far <= near:
        raise DomainError("Frustum needs 0 < near < far", {'near': near, 'far': far})
    if width_px < 1 or height_px < 1:
        raise DomainError("Window needs positive pixel dimensions", {'width_px': width_px, 'height_px': height_px})

    f = 1.0 / math.tan(math.radians(fov_y_deg) / 2.0)
    pm = np.array([
        [f / aspect, 0.0, 0.0, 0.0],
        [0.0, f, 0.0, 0.0],
        [0.0, 0.0, (far + near) / (near - far), 2.0 * far * near / (near - far)],
        [0.0, 0.0, -1.0, 0.0],
    ])

    w, h = float(width_px), float(height_px)
    wm = np.array([
        [w / 2.0, 0.0, 0.0, w / 2.0],
        [0.0, -h / 2.0, 0.0, h / 2.0],
        [0.0, 0.0, 0.5, 0.5],
        [0.0, 0.0, 0.0, 1.0],
    ])
    return pm, wm


def world_to_screen(
    p: EcefPoint,
    vm: np.ndarray,
    pm: np.ndarray,
    wm: np.ndarray,
) -> Tuple[float, float, float]:
    """
    Project a world point to window pixels.

    Returns:
        (x_px, y_px, depth) with depth normalized to [0, 1] inside the frustum

    Raises:
        ProjectionError: If the point is at or behind the eye plane
    """
    clip = pm @ (vm @ np.array([p.x, p.y, p.z, 1.0]))
    w = float(clip[3])
    if w <= MIN_CLIP_W:
        raise ProjectionError("Point is at or behind the eye plane", w=w)

    ndc = clip[:3] / w
    window = wm @ np.array([ndc[0], ndc[1], ndc[2], 1.0])
    return float(window[0]), float(window[1]), float(window[2])
