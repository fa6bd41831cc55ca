"""Fast self-checks of the model invariants, run by ``lumenlens validate``."""
from __future__ import annotations

import numpy as np

from .geometry import (lens_center, lens_normal, pd_position, receiver_normal, rot_y, rot_z,
                       rotation_room_to_receiver)
from .lenscontrol import cls_scheme, vulo_angles
from .optics import ProjectionError, project_vertex, refract
from .polygon import polygon_area, polygon_intersection_area
from .scenario import ScenarioConfig, paper_defaults

Z = np.array([0.0, 0.0, 1.0])


def check_geometry(rng, n=1000):
    err = 0.0
    for _ in range(n):
        tR, pR, tL, pL = rng.uniform(-np.pi, np.pi, 4)
        R = rot_y(pR) @ rot_z(tR)
        err = max(err, np.abs(R - rotation_room_to_receiver(tR, pR)).max())
        err = max(err, np.abs(R.T @ Z - receiver_normal(tR, pR)).max())
        L = rot_y(pL) @ rot_z(tL)
        err = max(err, np.abs(R.T @ L.T @ Z - lens_normal(tR, pR, tL, pL)).max())
    return err <= 1e-10, f"max closed-form error {err:.2e}"


def check_refraction(rng, n=2000):
    worst = 0.0
    for _ in range(n):
        a = rng.normal(size=3)
        a /= np.linalg.norm(a)
        b = rng.normal(size=3)
        b /= np.linalg.norm(b)
        nl = rng.uniform(1.05, 2.0)
        r = refract(a, b, nl)
        worst = max(worst, abs(np.linalg.norm(r) - 1),
                    abs(np.linalg.norm(np.cross(a, r)) - np.linalg.norm(np.cross(a, b)) / nl))
    return worst <= 1e-12, f"max norm/Snell residual {worst:.2e}"


def check_plugback(cfg: ScenarioConfig, rng, n=2000):
    worst = 0.0
    for _ in range(n):
        pose = cfg.pose(rng.uniform(0, 2 * np.pi), np.deg2rad(rng.uniform(0, 30)))
        lens = cfg.lens(rng.uniform(0.01, 0.15), rng.uniform(0, 2 * np.pi), np.deg2rad(rng.uniform(0, 30)))
        q = cfg.led_vertices[rng.integers(cfg.n_t), rng.integers(4)]
        try:
            img, spot = project_vertex(q, pose, lens)
        except ProjectionError:
            continue
        p_len = lens_center(pose, lens.d_len)
        n_len = lens_normal(pose.theta_R, pose.phi_R, lens.theta_L, lens.phi_L)
        n_R = receiver_normal(pose.theta_R, pose.phi_R)
        worst = max(worst, abs((spot - pose.position) @ n_R))
        worst = max(worst, np.linalg.norm(np.cross(spot - p_len, img - p_len)))
    return worst <= 1e-10, f"max plane/ray residual {worst:.2e}"


def check_polygons(rng, n=20, samples=400_000):
    worst = 0.0
    for _ in range(n):
        a = _random_convex_quad(rng)
        b = _random_convex_quad(rng)
        worst = max(worst, _mc_rel_error(polygon_area(a), rng, samples, a))
        lo = np.maximum(a.min(axis=0), b.min(axis=0))
        hi = np.minimum(a.max(axis=0), b.max(axis=0))
        if np.all(hi > lo):
            pts = rng.uniform(lo, hi, size=(samples, 2))
            frac = (_inside(pts, a) & _inside(pts, b)).mean()
            if frac > 0.2:
                est = frac * np.prod(hi - lo)
                worst = max(worst, abs(polygon_intersection_area(a, b) - est) / est)
    return worst <= 0.01, f"max relative error vs rasterisation {worst:.2%}"


def _mc_rel_error(exact, rng, samples, poly):
    lo, hi = poly.min(axis=0), poly.max(axis=0)
    pts = rng.uniform(lo, hi, size=(samples, 2))
    est = _inside(pts, poly).mean() * np.prod(hi - lo)
    return abs(exact - est) / est


def check_schemes(cfg: ScenarioConfig, rng, n=300):
    worst_cls, worst_vulo = 0.0, 0.0
    for _ in range(n):
        pose = cfg.pose(rng.uniform(0, 2 * np.pi), np.deg2rad(abs(rng.normal(0, 5))))
        res = cls_scheme(cfg, pose)
        if not res.clamped:
            worst_cls = max(worst_cls, res.pointing_residual)
        f, t, p, flags = vulo_angles(pose, cfg.bounds, cfg.d_len)
        if not flags:
            worst_vulo = max(worst_vulo, 1 - lens_normal(pose.theta_R, pose.phi_R, t, p)[2])
    return worst_cls <= 1e-6 and worst_vulo <= 1e-12, \
        f"CLS pointing {worst_cls:.2e} rad, VULO 1-n_z {worst_vulo:.2e}"


def check_gsm(cfg: ScenarioConfig, rng):
    ss = cfg.signal_set
    ok = all(ss.encode(ss.decode(k)) == k for k in range(len(ss)))
    ok &= bool(np.all((ss.vectors > 0).sum(axis=1) == cfg.n_a))
    return ok, f"{len(ss)} labels, eta={ss.eta}"


def check_pd_plane(cfg: ScenarioConfig, rng, n=200):
    worst = 0.0
    xy = cfg.pd_layout.local_xy()
    for _ in range(n):
        pose = cfg.pose(*rng.uniform(0, np.pi, 2))
        a, b = xy[rng.integers(len(xy), size=2)]
        worst = max(worst, abs(receiver_normal(pose.theta_R, pose.phi_R)
                               @ (pd_position(pose, a) - pd_position(pose, b))))
    return worst <= 1e-12, f"max PD-plane residual {worst:.2e}"


def _random_convex_quad(rng):
    # points on an ellipse, in angular order, are convex and CCW
    ang = np.sort(rng.uniform(0, 2 * np.pi, 4))
    A = np.diag(rng.uniform(0.2, 0.6, 2))
    rot = rng.uniform(0, np.pi)
    c, s = np.cos(rot), np.sin(rot)
    A = np.array([[c, -s], [s, c]]) @ A
    return rng.uniform(-0.3, 0.3, 2) + np.column_stack([np.cos(ang), np.sin(ang)]) @ A.T


def _inside(pts, poly):
    # CCW convex polygon: inside iff left of every edge
    ok = np.ones(len(pts), dtype=bool)
    for k in range(len(poly)):
        a, b = poly[k], poly[(k + 1) % len(poly)]
        ok &= (b[0] - a[0]) * (pts[:, 1] - a[1]) - (b[1] - a[1]) * (pts[:, 0] - a[0]) >= 0
    return ok


def run_all(cfg: ScenarioConfig | None = None, seed: int = 0):
    cfg = cfg or paper_defaults()
    rng = np.random.default_rng(seed)
    checks = [
        ("geometry closed forms", lambda: check_geometry(rng)),
        ("PD plane orthogonality", lambda: check_pd_plane(cfg, rng)),
        ("refraction norm + Snell", lambda: check_refraction(rng)),
        ("projection plug-back", lambda: check_plugback(cfg, rng)),
        ("polygon areas", lambda: check_polygons(rng)),
        ("CLS pointing / VULO verticality", lambda: check_schemes(cfg, rng)),
        ("GSM labels", lambda: check_gsm(cfg, rng)),
    ]
    return [(name, *fn()) for name, fn in checks]
