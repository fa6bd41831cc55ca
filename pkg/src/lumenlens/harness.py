"""Experiment sweeps over receiver orientation and LED spacing, plus result I/O.

Every orientation draw gets its own RNG substream derived from
``(seed, point index, draw index)``; all schemes at one draw see the same
orientation and the same Monte Carlo noise stream, and the worker count never
changes any number.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ber import ber_monte_carlo
from .lenscontrol import SCHEMES, solve
from .optics import channel_matrix
from .scenario import ConfigError, ScenarioConfig

__all__ = [
    "SCHEMA",
    "ResultRow",
    "sample_orientation",
    "run_draw",
    "run_orientation_sweep",
    "run_dtx_sweep",
    "format_results",
    "emit_results",
    "read_results",
]

log = logging.getLogger(__name__)

SCHEMA = "lumenlens-v1"
PHI_CAP = np.nextafter(90.0, 0.0)


@dataclass(frozen=True)
class ResultRow:
    sweep_var: str
    value: float
    scheme: str
    bound: float
    ber: float
    ber_stderr: float
    f: float
    theta_L_deg: float
    phi_L_deg: float
    clamped: int
    draws: int
    seed: int
    draw: int = -1  # -1 marks an aggregate over draws
    failed: int = 0
    bound_gt1: int = 0


FIELDS = [f.name for f in dataclasses.fields(ResultRow)]
_INT_FIELDS = {"clamped", "draws", "seed", "draw", "failed", "bound_gt1"}
_STR_FIELDS = {"sweep_var", "scheme"}


def sample_orientation(sigma2_phiR: float, rng: np.random.Generator):
    """Random receiver orientation ``(theta_R, phi_R)`` in radians.

    ``phi_R`` is a folded zero-mean Gaussian with variance ``sigma2_phiR``
    (degrees squared), capped just below 90 degrees; ``theta_R`` is uniform on
    [0, 360) degrees.
    """
    if sigma2_phiR < 0:
        raise ValueError(f"variance must be non-negative, got {sigma2_phiR}")
    phi = min(abs(rng.standard_normal() * np.sqrt(sigma2_phiR)), PHI_CAP)
    theta = rng.uniform(0.0, 360.0)
    return float(np.deg2rad(theta)), float(np.deg2rad(phi))


def run_draw(config: ScenarioConfig, sigma2: float, schemes, point: int, draw: int,
             trials: int, seed: int) -> list[dict]:
    """Solve every scheme for one orientation draw; one record per scheme."""
    orient_ss, mc_ss = np.random.SeedSequence([seed, point, draw]).spawn(2)
    theta_R, phi_R = sample_orientation(sigma2, np.random.default_rng(orient_ss))
    pose = config.pose(theta_R, phi_R)
    out = []
    for scheme in schemes:
        try:
            res = solve(scheme, config, pose)
            H = channel_matrix(config, pose, res.lens)
            est = ber_monte_carlo(H, config.signal_set, config.gsm, trials,
                                  np.random.default_rng(mc_ss))
        except (ValueError, ArithmeticError) as exc:
            log.warning("draw %d of point %d failed for %s: %s", draw, point, scheme, exc)
            out.append({"scheme": scheme, "ok": False})
            continue
        out.append({
            "scheme": scheme, "ok": True, "bound": res.predicted_bound,
            "ber": est.value, "stderr": est.std_error, "f": res.lens.f,
            "theta": float(np.rad2deg(res.lens.theta_L)), "phi": float(np.rad2deg(res.lens.phi_L)),
            "clamped": int(res.clamped),
        })
    return out


def _run_draw_task(args):
    return run_draw(*args)


def _execute(tasks, workers: int):
    if workers <= 1:
        return [_run_draw_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_draw_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def _aggregate(sweep_var, value, scheme, recs, seed, draws_total):
    ok = [r for r in recs if r["ok"]]
    failed = draws_total - len(ok)
    if not ok:
        nan = float("nan")
        return ResultRow(sweep_var, value, scheme, nan, nan, nan, nan, nan, nan, 0, 0, seed,
                         failed=failed)
    ber = np.array([r["ber"] for r in ok])
    if len(ok) > 1:
        se = float(ber.std(ddof=1) / np.sqrt(len(ok)))
    else:
        se = float(ok[0]["stderr"])
    bound = float(np.mean([r["bound"] for r in ok]))
    return ResultRow(
        sweep_var, float(value), scheme, bound, float(ber.mean()), se,
        float(np.mean([r["f"] for r in ok])),
        float(np.mean([r["theta"] for r in ok])),
        float(np.mean([r["phi"] for r in ok])),
        int(sum(r["clamped"] for r in ok)), len(ok), seed,
        failed=failed, bound_gt1=int(bound > 1),
    )


def _per_draw_rows(sweep_var, value, recs_by_draw, scheme, seed):
    rows = []
    for d, recs in enumerate(recs_by_draw):
        r = next(r for r in recs if r["scheme"] == scheme)
        if not r["ok"]:
            nan = float("nan")
            rows.append(ResultRow(sweep_var, float(value), scheme, nan, nan, nan, nan, nan, nan,
                                  0, 0, seed, draw=d, failed=1))
            continue
        rows.append(ResultRow(sweep_var, float(value), scheme, r["bound"], r["ber"], r["stderr"],
                              r["f"], r["theta"], r["phi"], r["clamped"], 1, seed, draw=d,
                              bound_gt1=int(r["bound"] > 1)))
    return rows


def _sweep(points, sweep_var, schemes, draws, trials, seed, workers, per_draw):
    """``points`` is a list of ``(value, config, sigma2)``."""
    for s in schemes:
        if s not in SCHEMES:
            raise ValueError(f"unknown scheme {s!r}; choose from {SCHEMES}")
    if draws < 1 or trials < 1:
        raise ValueError("draws and trials must be >= 1")
    tasks = [(cfg, s2, tuple(schemes), p, d, trials, seed)
             for p, (_, cfg, s2) in enumerate(points) for d in range(draws)]
    results = _execute(tasks, workers)
    rows = []
    for p, (value, _, _) in enumerate(points):
        by_draw = results[p * draws:(p + 1) * draws]
        var = sweep_var(p) if callable(sweep_var) else sweep_var
        for scheme in schemes:
            recs = [next(r for r in rec if r["scheme"] == scheme) for rec in by_draw]
            rows.append(_aggregate(var, value, scheme, recs, seed, draws))
            if per_draw:
                rows.extend(_per_draw_rows(var, value, by_draw, scheme, seed))
    return rows


def run_orientation_sweep(config: ScenarioConfig, sigma2_list, schemes=("cls", "static"),
                          draws: int = 200, trials: int = 100_000, seed: int | None = None,
                          workers: int = 1, per_draw: bool = False) -> list[ResultRow]:
    """BER versus orientation variance (degrees squared) for each scheme."""
    seed = config.seed if seed is None else seed
    points = [(float(s2), config, float(s2)) for s2 in sigma2_list]
    return _sweep(points, "sigma2_phiR", schemes, draws, trials, seed, workers, per_draw)


def run_dtx_sweep(config: ScenarioConfig, dtx_list, variants=None, sigma2: float = 10.0,
                  n_a: int = 1, schemes=("cls",), draws: int = 50, trials: int = 100_000,
                  seed: int | None = None, workers: int = 1,
                  per_draw: bool = False) -> list[ResultRow]:
    """BER versus inter-LED spacing.

    ``variants`` is a list of ``(n_t, n_r, d_rx)`` tuples (default: the config's
    own); each is tagged in the ``sweep_var`` column as
    ``d_tx|Nt=..|Nr=..|drx=..``.
    """
    seed = config.seed if seed is None else seed
    if variants is None:
        variants = [(config.n_t, config.n_r, config.d_rx)]
    points, labels = [], []
    for n_t, n_r, d_rx in variants:
        for dtx in dtx_list:
            try:
                cfg = config.replace(n_t=int(n_t), n_r=int(n_r), d_rx=float(d_rx),
                                     d_rs=min(config.d_rs, float(d_rx)), d_tx=float(dtx), n_a=n_a)
            except ConfigError as exc:
                raise ConfigError(f"d_tx={dtx} (N_t={n_t}): {exc}") from exc
            points.append((float(dtx), cfg, sigma2))
            labels.append(f"d_tx|Nt={n_t}|Nr={n_r}|drx={d_rx:g}")
    return _sweep(points, labels.__getitem__, schemes, draws, trials, seed, workers, per_draw)


def _fmt(name, v):
    if name in _STR_FIELDS:
        return v
    if name in _INT_FIELDS:
        return str(int(v))
    return format(float(v), ".17g")


def format_results(rows, fmt: str = "csv") -> str:
    """Serialise rows as CSV (with a ``# lumenlens-v1`` first line) or a JSON array."""
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to write")
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(f"# {SCHEMA}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(FIELDS)
        for r in rows:
            w.writerow([_fmt(k, getattr(r, k)) for k in FIELDS])
        text = buf.getvalue()
    elif fmt == "json":
        recs = []
        for r in rows:
            parts = []
            for k in FIELDS:
                v = getattr(r, k)
                if k in _STR_FIELDS:
                    parts.append(f"{json.dumps(k)}: {json.dumps(v)}")
                elif k not in _INT_FIELDS and not np.isfinite(v):
                    parts.append(f"{json.dumps(k)}: null")
                else:
                    parts.append(f"{json.dumps(k)}: {_fmt(k, v)}")
            recs.append("  {" + ", ".join(parts) + "}")
        text = "[\n" + ",\n".join(recs) + "\n]\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return text


def emit_results(rows, path, fmt: str = "csv") -> None:
    """Write :func:`format_results` output to ``path``."""
    text = format_results(rows, fmt)
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def _coerce(k, v):
    if k in _STR_FIELDS:
        return v
    if k in _INT_FIELDS:
        return int(v)
    return float("nan") if v is None else float(v)


def read_results(path) -> list[ResultRow]:
    """Parse a file written by :func:`emit_results` (format from its first byte)."""
    text = Path(path).read_text()
    if text.lstrip().startswith("["):
        return [ResultRow(**{k: _coerce(k, rec[k]) for k in FIELDS}) for rec in json.loads(text)]
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    return [ResultRow(**{k: _coerce(k, rec[k]) for k in FIELDS}) for rec in reader]
