"""Optical channel of the liquid-lens imaging receiver.

Each LED contributes a Lambertian line-of-sight gain to the lens aperture; its
four corners are refracted through the lens centroid onto the PD plane, and the
fraction of the resulting light spot falling on each PD sets the imaging gain.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .geometry import Z_HAT, ReceiverPose, lens_center, lens_normal, receiver_normal
from .polygon import canonical_ccw, polygon_area, polygon_intersection_area

__all__ = [
    "LensState",
    "ProjectionError",
    "TotalInternalReflection",
    "los_gain",
    "refract",
    "project_vertex",
    "spot_polygon",
    "channel_matrix",
    "unit_aperture_channel",
]

log = logging.getLogger(__name__)

PARALLEL_TOL = 1e-12


class ProjectionError(ValueError):
    """A ray from an LED corner never reaches the target plane."""


class TotalInternalReflection(ProjectionError):
    pass


@dataclass(frozen=True)
class LensState:
    """Lens controls ``(f, theta_L, phi_L)`` plus the fixed mounting/material constants.

    ``aperture_area`` overrides the default ``pi (k_eta f)^2``.
    """

    f: float
    theta_L: float = 0.0
    phi_L: float = 0.0
    d_len: float = 0.02
    k_eta: float = 0.1
    n_l: float = 1.5
    aperture_area: float | None = None

    def __post_init__(self):
        if self.f <= 0:
            raise ValueError(f"focal length must be positive, got {self.f}")
        if self.n_l <= 1:
            raise ValueError(f"relative refractive index must exceed 1, got {self.n_l}")
        if self.k_eta <= 0:
            raise ValueError(f"k_eta must be positive, got {self.k_eta}")

    @property
    def area(self) -> float:
        if self.aperture_area is not None:
            return self.aperture_area
        return np.pi * (self.k_eta * self.f) ** 2


def _frame(pose: ReceiverPose, lens: LensState):
    p_len = lens_center(pose, lens.d_len)
    eta_len = lens_normal(pose.theta_R, pose.phi_R, lens.theta_L, lens.phi_L)
    eta_R = receiver_normal(pose.theta_R, pose.phi_R)
    return p_len, eta_len, eta_R


def los_gain(led_center, pose: ReceiverPose, lens: LensState, *, m: float, fov: float) -> float:
    """Lambertian LoS gain from an LED centre to the lens aperture.

    Parameters
    ----------
    led_center : array_like, shape (3,)
    m : float
        Lambertian order of the LED.
    fov : float
        Field of view (radians); incidence beyond it gives zero gain.
    """
    p_len, eta_len, _ = _frame(pose, lens)
    return float(_los_gains(np.atleast_2d(led_center), p_len, eta_len, lens.area, m, fov)[0])


def _los_gains(centers, p_len, eta_len, area, m, fov):
    diff = centers - p_len
    d = np.linalg.norm(diff, axis=1)
    if np.any(d == 0):
        raise ValueError("LED coincides with the lens centre")
    u = diff / d[:, None]
    cos_irr = u @ Z_HAT
    cos_inc = u @ eta_len
    gate = np.arccos(np.clip(cos_inc, -1.0, 1.0)) <= fov
    ok = (cos_inc > 0) & (cos_irr > 0) & gate
    g = (m + 1) * area / (2 * np.pi * d**2) * np.abs(cos_irr) ** m * cos_inc
    return np.where(ok, g, 0.0)


def refract(eta_len, eta_in, n_l: float) -> np.ndarray:
    """Vector Snell refraction through the lens surface.

    ``eta_in`` points from the lens towards the source; the result is the
    propagation direction after the lens, on the far side from the source.
    """
    eta_len = np.asarray(eta_len, dtype=float)
    eta_in = np.asarray(eta_in, dtype=float)
    out, ok = _refract(eta_len, eta_in[None, :], n_l)
    if not ok[0]:
        raise TotalInternalReflection("square-root argument negative")
    return out[0]


def _refract(eta_len, eta_in, n_l):
    cr = np.cross(eta_len, eta_in)
    arg = 1.0 - (cr * cr).sum(axis=1) / n_l**2
    ok = arg >= 0
    tang = np.cross(eta_len, cr) / n_l
    return tang - np.outer(np.sqrt(np.where(ok, arg, 0.0)), eta_len), ok


def _project(points, p_len, eta_len, eta_R, p_R, f, n_l):
    """Vectorised corner projection; returns (image, spot, valid)."""
    diff = points - p_len
    dist = np.linalg.norm(diff, axis=1)
    u = diff / dist[:, None]
    cos_q = u @ eta_len
    d_axial = dist * cos_q
    mag = f / (f + d_axial)
    ref, ok = _refract(eta_len, u, n_l)
    # image-plane anchor P_IP = P_len - mag * (P_T - P_len), P_T on the lens axis
    ref_len = ref @ eta_len
    ref_R = ref @ eta_R
    with np.errstate(divide="ignore", invalid="ignore"):
        lam_img = -(mag * d_axial) / ref_len
        lam_spot = ((p_R - p_len) @ eta_R) / ref_R
    ok &= cos_q > 0
    ok &= np.abs(ref_len) >= PARALLEL_TOL
    ok &= np.abs(ref_R) >= PARALLEL_TOL
    ok &= (lam_img > 0) & (lam_spot > 0)
    image = p_len + lam_img[:, None] * ref
    spot = p_len + lam_spot[:, None] * ref
    return image, spot, ok


def project_vertex(q, pose: ReceiverPose, lens: LensState):
    """Refract one LED corner through the lens centroid.

    Returns
    -------
    image_point, spot_point : ndarray
        Crossings of the refracted ray with the image plane and the PD plane.

    Raises
    ------
    ProjectionError
        If the corner is not in front of the lens or the ray misses a plane.
    """
    p_len, eta_len, eta_R = _frame(pose, lens)
    q = np.asarray(q, dtype=float)
    if (q - p_len) @ eta_len <= 0:
        raise ProjectionError("point is not in front of the lens")
    cr = np.cross(eta_len, (q - p_len) / np.linalg.norm(q - p_len))
    if 1.0 - cr @ cr / lens.n_l**2 < 0:
        raise TotalInternalReflection("square-root argument negative")
    image, spot, ok = _project(q[None, :], p_len, eta_len, eta_R, pose.position, lens.f, lens.n_l)
    if not ok[0]:
        raise ProjectionError("refracted ray is parallel to or behind a target plane")
    return image[0], spot[0]


def _spots_local(vertices, pose, lens, p_len, eta_len, eta_R):
    """(n, 4, 2) receiver-local spot corners and (n, 4) validity mask."""
    n = vertices.shape[0]
    _, spot, ok = _project(vertices.reshape(-1, 3), p_len, eta_len, eta_R,
                           pose.position, lens.f, lens.n_l)
    local = (spot - pose.position) @ pose.rotation.T
    return local[:, :2].reshape(n, 4, 2), ok.reshape(n, 4)


def spot_polygon(led_vertices, pose: ReceiverPose, lens: LensState) -> np.ndarray:
    """Light spot of one LED in receiver-local X'Y' coordinates, CCW ordered.

    Corners whose ray is lost are dropped; an empty (0, 2) array is returned
    when fewer than three survive.
    """
    p_len, eta_len, eta_R = _frame(pose, lens)
    pts, ok = _spots_local(np.asarray(led_vertices, dtype=float)[None], pose, lens,
                           p_len, eta_len, eta_R)
    kept = pts[0][ok[0]]
    if len(kept) < 3:
        return np.empty((0, 2))
    return canonical_ccw(kept)


def unit_aperture_channel(scenario, pose: ReceiverPose, lens: LensState) -> np.ndarray:
    """Channel matrix per unit aperture area, shape (n_r, n_t).

    The spot geometry does not depend on ``f``, so the full channel is this
    matrix times ``lens.area``.
    """
    p_len, eta_len, eta_R = _frame(pose, lens)
    los = _los_gains(scenario.led_centers, p_len, eta_len, 1.0,
                     scenario.lambertian_order, scenario.fov)
    spots, ok = _spots_local(scenario.led_vertices, pose, lens, p_len, eta_len, eta_R)
    pds = np.asarray(scenario.pd_layout.squares())
    pd_lo, pd_hi = pds.min(axis=1), pds.max(axis=1)
    H = np.zeros((scenario.n_r, scenario.n_t))
    for i in range(scenario.n_t):
        if los[i] == 0.0 or ok[i].sum() < 3:
            continue
        poly = canonical_ccw(spots[i][ok[i]])
        area = polygon_area(poly)
        if area <= 0.0:
            continue
        # cheap box test first; most PDs miss most spots
        hit = np.all((pd_hi > poly.min(axis=0)) & (pd_lo < poly.max(axis=0)), axis=1)
        for j in np.flatnonzero(hit):
            H[j, i] = los[i] * polygon_intersection_area(poly, pds[j]) / area
    return H


def channel_matrix(scenario, pose: ReceiverPose, lens: LensState) -> np.ndarray:
    """Optical channel ``H`` (n_r x n_t): LoS gain times spot/PD overlap fraction."""
    return lens.area * unit_aperture_channel(scenario, pose, lens)
