"""Lens adjustment schemes: exhaustive grid search, CLS, VULO and the fixed lens.

CLS (closest-LED selection) points the lens axis at the nearest LED and sets
``f`` to the lens-to-PD-plane distance along that axis. VULO (vertical upward
lens orientation) counter-rotates the lens so its axis is vertical and sets
``f = d_len / cos(phi_R)``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .ber import _pair_hamming, bound_from_distances, bounds_from_distances, pair_distances
from .geometry import ReceiverPose, lens_center, lens_normal, receiver_normal
from .optics import LensState, unit_aperture_channel

__all__ = [
    "ControlBounds",
    "SchemeResult",
    "SCHEMES",
    "NumericDomainError",
    "lens_bound",
    "optimize_exhaustive",
    "closest_led",
    "cls_angles",
    "cls_scheme",
    "vulo_angles",
    "vulo_scheme",
    "static_baseline",
    "solve",
]

log = logging.getLogger(__name__)

DOMAIN_TOL = 1e-9
TWO_PI = 2 * np.pi


class NumericDomainError(ValueError):
    """arcsin/arccos argument outside [-1, 1] beyond rounding."""


@dataclass(frozen=True)
class ControlBounds:
    """Box constraints on ``(f, theta_L, phi_L)`` and the exhaustive grid size."""

    f_min: float
    f_max: float
    theta_L_min: float
    theta_L_max: float
    phi_L_min: float
    phi_L_max: float
    n_f: int = 15
    n_theta: int = 24
    n_phi: int = 7

    def __post_init__(self):
        if not 0 < self.f_min <= self.f_max:
            raise ValueError(f"need 0 < f_min <= f_max, got [{self.f_min}, {self.f_max}]")
        if self.theta_L_min > self.theta_L_max or self.phi_L_min > self.phi_L_max:
            raise ValueError("angle bounds out of order")
        if min(self.n_f, self.n_theta, self.n_phi) < 1:
            raise ValueError("grid counts must be >= 1")

    @property
    def full_turn(self) -> bool:
        return self.theta_L_max - self.theta_L_min >= TWO_PI - 1e-12

    def f_grid(self) -> np.ndarray:
        return np.linspace(self.f_min, self.f_max, self.n_f)

    def theta_grid(self) -> np.ndarray:
        # a full turn would repeat its first point at the end
        return np.linspace(self.theta_L_min, self.theta_L_max, self.n_theta,
                           endpoint=not self.full_turn or self.n_theta == 1)

    def phi_grid(self) -> np.ndarray:
        return np.linspace(self.phi_L_min, self.phi_L_max, self.n_phi)

    def clamp(self, f: float, theta_L: float, phi_L: float):
        """Clamp into the box; returns ``(f, theta_L, phi_L, flags)``."""
        flags = []
        if self.full_turn:
            theta_L = self.theta_L_min + np.mod(theta_L - self.theta_L_min, TWO_PI)
        cf = float(np.clip(f, self.f_min, self.f_max))
        ct = float(np.clip(theta_L, self.theta_L_min, self.theta_L_max))
        cp = float(np.clip(phi_L, self.phi_L_min, self.phi_L_max))
        if cf != f:
            flags.append("f")
        if ct != theta_L:
            flags.append("theta_L")
        if cp != phi_L:
            flags.append("phi_L")
        return cf, ct, cp, tuple(flags)


@dataclass(frozen=True)
class SchemeResult:
    scheme: str
    lens: LensState
    predicted_bound: float
    clamp_flags: tuple = ()
    pointing_residual: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def clamped(self) -> bool:
        return bool(self.clamp_flags)


def lens_bound(scenario, pose: ReceiverPose, lens: LensState) -> float:
    """BER union bound for one lens state (the evaluator shared by every scheme)."""
    d_unit = pair_distances(unit_aperture_channel(scenario, pose, lens), scenario.signal_set)
    return bound_from_distances(lens.area * d_unit, _pair_hamming(scenario.signal_set),
                                scenario.gsm, scenario.signal_set.eta)


def optimize_exhaustive(scenario, pose: ReceiverPose, bounds: ControlBounds | None = None,
                        extra=()) -> SchemeResult:
    """Grid search of the union bound over ``f x theta_L x phi_L``.

    ``extra`` lens states are evaluated alongside the grid. Ties go to the
    lexicographically smallest ``(f, theta_L, phi_L)``.
    """
    bounds = bounds or scenario.bounds
    ss = scenario.signal_set
    ham = _pair_hamming(ss)
    f_grid = bounds.f_grid()

    best = None

    def consider(bounds_, lenses):
        nonlocal best
        for b, lens in zip(bounds_, lenses):
            rank = (float(b), lens.f, lens.theta_L, lens.phi_L)
            if best is None or rank < best[0]:
                best = (rank, lens)

    # The spot geometry ignores f and the bound is non-increasing in the aperture
    # area, so every angle pair is first scored at f_max; only the pairs tied
    # for the minimum need the whole f column to settle the tie-break.
    angle_pairs = [(float(t), float(p)) for t in bounds.theta_grid() for p in bounds.phi_grid()]
    d_units, top = [], []
    for theta, phi in angle_pairs:
        lens = scenario.lens(float(f_grid[-1]), theta, phi)
        d_units.append(pair_distances(unit_aperture_channel(scenario, pose, lens), ss))
        top.append(bound_from_distances(lens.area * d_units[-1], ham, scenario.gsm, ss.eta))
    b_min = min(top)
    for (theta, phi), d_unit, b in zip(angle_pairs, d_units, top):
        if b > b_min:
            continue
        lenses = [scenario.lens(float(f), theta, phi) for f in f_grid]
        areas = np.array([lens.area for lens in lenses])
        consider(bounds_from_distances(areas[:, None] * d_unit, ham, scenario.gsm, ss.eta), lenses)
    for lens in extra:
        consider([lens_bound(scenario, pose, lens)], [lens])
    return SchemeResult("exhaustive", best[1], best[0][0])


def closest_led(lens_pos, led_centers, rtol: float = 1e-12) -> int:
    """Index of the LED nearest the lens; near-ties (``rtol``) go to the lowest index."""
    d = np.linalg.norm(np.asarray(led_centers, dtype=float) - np.asarray(lens_pos, dtype=float), axis=1)
    return int(np.flatnonzero(d <= d.min() * (1 + rtol))[0])


def _checked(x: float, what: str) -> float:
    if abs(x) > 1 + DOMAIN_TOL:
        raise NumericDomainError(f"{what} argument {x!r} outside [-1, 1]")
    return float(np.clip(x, -1.0, 1.0))


def _pointing_error(pose, theta_L, phi_L, u) -> float:
    n = lens_normal(pose.theta_R, pose.phi_R, theta_L, phi_L)
    return float(np.arctan2(np.linalg.norm(np.cross(n, u)), n @ u))


def cls_angles(pose: ReceiverPose, target_dir):
    """Lens angles pointing the axis along unit vector ``target_dir``.

    The single-valued closed form ``cos phi_L = cos phi_R * u_z`` is tried first.
    It holds only when the LED lies in the plane spanned by the receiver normal
    and the vertical, so the two roots of the underlying quadratic in
    ``cos phi_L`` are also tried, with ``theta_L`` from the quadrant-aware
    ``atan2``. The candidate with the smallest pointing error wins.

    Returns ``(theta_L, phi_L, pointing_error)``.
    """
    ux, uy, uz = np.asarray(target_dir, dtype=float)
    ctR, stR = np.cos(pose.theta_R), np.sin(pose.theta_R)
    cpR, spR = np.cos(pose.phi_R), np.sin(pose.phi_R)
    w = ctR * uy - stR * ux
    c0 = _checked(cpR * uz, "arccos")
    candidates = []

    phi0 = np.arccos(c0)
    s0 = np.sqrt(1.0 - c0 * c0)
    try:
        theta0 = np.arcsin(_checked(w / s0, "arcsin")) if s0 > 0 else 0.0
        candidates.append((theta0, phi0))
    except NumericDomainError:
        log.debug("CLS closed form outside arcsin domain; relying on quadratic roots")

    disc = max(0.0, 1.0 - uz * uz - w * w)
    for sign in (1.0, -1.0):
        c = float(np.clip(cpR * uz + sign * spR * np.sqrt(disc), -1.0, 1.0))
        phi = np.arccos(c)
        # x-component in the receiver frame: (ctR ux + stR uy) cpR - spR uz
        xr = (ctR * ux + stR * uy) * cpR - spR * uz
        candidates.append((np.arctan2(w, xr), phi))

    u = np.array([ux, uy, uz])
    scored = [(_pointing_error(pose, t, p, u), k, t, p) for k, (t, p) in enumerate(candidates)]
    err, k, theta, phi = min(scored)
    if k != 0 and len(candidates) == 3:
        log.debug("CLS closed form missed by %.3e rad; using quadratic root", scored[0][0])
    return float(theta), float(phi), err


def cls_scheme(scenario, pose: ReceiverPose, bounds: ControlBounds | None = None) -> SchemeResult:
    bounds = bounds or scenario.bounds
    p_len = lens_center(pose, scenario.d_len)
    i_star = closest_led(p_len, scenario.led_centers)
    diff = scenario.led_centers[i_star] - p_len
    eta_R = receiver_normal(pose.theta_R, pose.phi_R)
    if diff @ eta_R <= 0:
        raise ValueError("closest LED is not above the lens plane")
    u = diff / np.linalg.norm(diff)
    theta, phi, err = cls_angles(pose, u)
    f_star = scenario.d_len / (u @ eta_R)
    f, theta_c, phi_c, flags = bounds.clamp(f_star, theta, phi)
    lens = scenario.lens(f, theta_c, phi_c)
    return SchemeResult("cls", lens, lens_bound(scenario, pose, lens), flags, err,
                        {"led": i_star, "f_star": f_star})


def vulo_angles(pose: ReceiverPose, bounds: ControlBounds, d_len: float):
    """Vertical-axis lens angles; returns ``(f, theta_L, phi_L, flags)``.

    Two solutions exist: ``(theta_L, phi_L) = (0, -phi_R)`` and ``(pi, phi_R)``.
    The first is used when it is inside the bounds, otherwise the second.
    """
    if not pose.phi_R < np.pi / 2:
        raise ValueError(f"phi_R={pose.phi_R} rad: the lens cannot face upward")
    f_star = d_len / np.cos(pose.phi_R)
    in_theta = lambda t: bounds.theta_L_min <= t <= bounds.theta_L_max  # noqa: E731
    in_phi = lambda p: bounds.phi_L_min <= p <= bounds.phi_L_max  # noqa: E731
    if in_theta(0.0) and in_phi(-pose.phi_R):
        theta, phi = 0.0, 0.0 - pose.phi_R
    else:
        theta, phi = np.pi, pose.phi_R
    return bounds.clamp(f_star, theta, phi)


def vulo_scheme(scenario, pose: ReceiverPose, bounds: ControlBounds | None = None) -> SchemeResult:
    bounds = bounds or scenario.bounds
    f, theta, phi, flags = vulo_angles(pose, bounds, scenario.d_len)
    lens = scenario.lens(f, theta, phi)
    return SchemeResult("vulo", lens, lens_bound(scenario, pose, lens), flags)


def static_baseline(scenario, pose: ReceiverPose | None = None) -> SchemeResult:
    """Non-adjustable lens: axis along the receiver normal, ``f = d_len``."""
    lens = scenario.lens(scenario.d_len, 0.0, 0.0, aperture_area=scenario.static_aperture_area)
    bound = float("nan") if pose is None else lens_bound(scenario, pose, lens)
    return SchemeResult("static", lens, bound)


SCHEMES = ("exhaustive", "cls", "vulo", "static")


def solve(scheme: str, scenario, pose: ReceiverPose) -> SchemeResult:
    if scheme == "exhaustive":
        return optimize_exhaustive(scenario, pose)
    if scheme == "cls":
        return cls_scheme(scenario, pose)
    if scheme == "vulo":
        return vulo_scheme(scenario, pose)
    if scheme == "static":
        return static_baseline(scenario, pose)
    raise ValueError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
