"""Frame algebra for the room (OXYZ), receiver (O'X'Y'Z') and lens (O''X''Y''Z'') frames.

All rotations are passive: ``R @ v_room`` gives the coordinates of ``v_room`` in
the rotated frame, so the inverse (transpose) maps local vectors back to the room.
Angles are radians.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "rot_y",
    "rot_z",
    "rotation_room_to_receiver",
    "rotation_receiver_to_lens",
    "receiver_normal",
    "pd_position",
    "lens_center",
    "lens_normal",
    "ReceiverPose",
    "PdLayout",
]

Z_HAT = np.array([0.0, 0.0, 1.0])


def rot_z(theta: float) -> np.ndarray:
    """Passive rotation about Z by ``theta``."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_y(phi: float) -> np.ndarray:
    """Passive rotation about Y by ``phi``."""
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, 0.0, -s], [0.0, 1.0, 0.0], [s, 0.0, c]])


def rotation_room_to_receiver(theta_R: float, phi_R: float) -> np.ndarray:
    """Rotation from the room frame to the receiver frame, ``R_Y(phi_R) R_Z(theta_R)``.

    Written out in closed form; the transpose is the inverse.
    """
    ct, st = np.cos(theta_R), np.sin(theta_R)
    cp, sp = np.cos(phi_R), np.sin(phi_R)
    return np.array(
        [
            [ct * cp, st * cp, -sp],
            [-st, ct, 0.0],
            [ct * sp, st * sp, cp],
        ]
    )


def rotation_receiver_to_lens(theta_L: float, phi_L: float) -> np.ndarray:
    """Rotation from the receiver frame to the lens frame; same form as the receiver."""
    return rotation_room_to_receiver(theta_L, phi_L)


@dataclass(frozen=True)
class ReceiverPose:
    """Receiver centre (room frame, metres) and its azimuth/polar rotation (radians)."""

    position: np.ndarray
    theta_R: float = 0.0
    phi_R: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float).reshape(3))

    @property
    def rotation(self) -> np.ndarray:
        return rotation_room_to_receiver(self.theta_R, self.phi_R)


@dataclass(frozen=True)
class PdLayout:
    """Square grid of ``n_r`` photodiodes of side ``d_rs`` at pitch ``d_rx``.

    PD ``j`` sits at row ``j // k``, column ``j % k`` of the ``k x k`` grid, with
    local coordinates ``((c - (k-1)/2) d_rx, (r - (k-1)/2) d_rx)``.
    """

    n_r: int
    d_rx: float
    d_rs: float

    def __post_init__(self):
        k = int(round(np.sqrt(self.n_r)))
        if k * k != self.n_r or k < 1:
            raise ValueError(f"n_r must be a perfect square, got {self.n_r}")
        if not 0 < self.d_rs <= self.d_rx:
            raise ValueError(f"need 0 < d_rs <= d_rx, got d_rs={self.d_rs}, d_rx={self.d_rx}")

    @property
    def side(self) -> int:
        return int(round(np.sqrt(self.n_r)))

    def local_xy(self) -> np.ndarray:
        """(n_r, 2) array of PD centres in the receiver's X'Y' plane."""
        k = self.side
        idx = np.arange(self.n_r)
        rows, cols = idx // k, idx % k
        offset = (k - 1) / 2.0
        return np.column_stack([(cols - offset) * self.d_rx, (rows - offset) * self.d_rx])

    def squares(self) -> list[np.ndarray]:
        """Each PD as a CCW (4, 2) vertex array in receiver-local coordinates."""
        h = self.d_rs / 2.0
        corners = np.array([[-h, -h], [h, -h], [h, h], [-h, h]])
        return [c + corners for c in self.local_xy()]


def receiver_normal(theta_R: float, phi_R: float) -> np.ndarray:
    """Unit normal of the PD plane in room coordinates."""
    return np.array(
        [
            np.cos(theta_R) * np.sin(phi_R),
            np.sin(theta_R) * np.sin(phi_R),
            np.cos(phi_R),
        ]
    )


def pd_position(pose: ReceiverPose, pd_local_xy) -> np.ndarray:
    """Room-frame position of a PD given its local (x', y') coordinates."""
    x, y = float(pd_local_xy[0]), float(pd_local_xy[1])
    ct, st = np.cos(pose.theta_R), np.sin(pose.theta_R)
    cp, sp = np.cos(pose.phi_R), np.sin(pose.phi_R)
    xR, yR, zR = pose.position
    return np.array(
        [
            xR + x * ct * cp - y * st,
            yR + x * st * cp + y * ct,
            zR - x * sp,
        ]
    )


def lens_center(pose: ReceiverPose, d_len: float) -> np.ndarray:
    """Lens centroid, ``d_len`` along the receiver's Z' axis."""
    if d_len <= 0:
        raise ValueError(f"d_len must be positive, got {d_len}")
    return pose.position + d_len * receiver_normal(pose.theta_R, pose.phi_R)


def lens_normal(theta_R: float, phi_R: float, theta_L: float, phi_L: float) -> np.ndarray:
    """Unit lens axis in room coordinates for receiver angles and lens tilt angles."""
    ctR, stR = np.cos(theta_R), np.sin(theta_R)
    cpR, spR = np.cos(phi_R), np.sin(phi_R)
    ctL, stL = np.cos(theta_L), np.sin(theta_L)
    cpL, spL = np.cos(phi_L), np.sin(phi_L)
    return np.array(
        [
            ctR * cpR * ctL * spL - stR * stL * spL + ctR * spR * cpL,
            stR * cpR * ctL * spL + ctR * stL * spL + stR * spR * cpL,
            -spR * ctL * spL + cpR * cpL,
        ]
    )
