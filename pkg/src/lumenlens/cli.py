"""Command line entry point: ``lumenlens {orientation-sweep,dtx-sweep,single,validate}``."""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .ber import ber_monte_carlo, ber_upper_bound
from .harness import emit_results, format_results, run_dtx_sweep, run_orientation_sweep
from .lenscontrol import SCHEMES, solve
from .optics import channel_matrix
from .scenario import load_config, paper_defaults


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _schemes(text):
    out = [s.strip() for s in text.split(",") if s.strip()]
    bad = [s for s in out if s not in SCHEMES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown scheme(s) {bad}; choose from {SCHEMES}")
    return out


def _variant(text):
    n_t, n_r, d_rx = text.split(":")
    return int(n_t), int(n_r), float(d_rx)


def _common(p, draws, trials):
    p.add_argument("--config", help="YAML scenario file (default: shipped defaults)")
    p.add_argument("--seed", type=int, help="master seed (default: from config)")
    p.add_argument("--schemes", type=_schemes, default=None, help="comma list of " + ",".join(SCHEMES))
    p.add_argument("--draws", type=int, default=draws, help="orientation draws per point")
    p.add_argument("--trials", type=int, default=trials, help="max Monte Carlo channel uses per draw")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--per-draw", action="store_true", help="also emit one row per draw")
    p.add_argument("--out", help="output file (default: stdout as CSV)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser():
    parser = argparse.ArgumentParser(prog="lumenlens", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orientation-sweep", help="BER vs receiver-orientation variance")
    _common(p, draws=200, trials=100_000)
    p.add_argument("--sigma2", type=_floats, default=[0, 5, 10, 15, 20, 25, 30],
                   help="comma list of phi_R variances in degrees^2")

    p = sub.add_parser("dtx-sweep", help="BER vs inter-LED spacing")
    _common(p, draws=50, trials=100_000)
    p.add_argument("--dtx", type=_floats, default=[round(0.3 + 0.1 * k, 1) for k in range(13)])
    p.add_argument("--variant", type=_variant, action="append",
                   help="N_t:N_r:d_rx, repeatable (default: config values)")
    p.add_argument("--sigma2", type=float, default=10.0)
    p.add_argument("--n-a", type=int, default=1)

    p = sub.add_parser("single", help="one pose: channel, bounds and scheme outputs")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--schemes", type=_schemes, default=list(SCHEMES))
    p.add_argument("--theta-r", type=float, default=0.0, help="degrees")
    p.add_argument("--phi-r", type=float, default=0.0, help="degrees")
    p.add_argument("--trials", type=int, default=100_000)

    p = sub.add_parser("validate", help="run the invariant self-checks")
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _load(args):
    cfg = load_config(args.config) if args.config else paper_defaults()
    if getattr(args, "seed", None) is not None:
        cfg = cfg.replace(seed=args.seed)
    return cfg


def _write(rows, args):
    if args.out:
        emit_results(rows, args.out, args.format)
    else:
        sys.stdout.write(format_results(rows, args.format))


def _single(cfg, args):
    np.set_printoptions(precision=4, linewidth=160)
    pose = cfg.pose(np.deg2rad(args.theta_r), np.deg2rad(args.phi_r))
    print(f"pose: P_R={pose.position}, theta_R={args.theta_r} deg, phi_R={args.phi_r} deg")
    for scheme in args.schemes:
        res = solve(scheme, cfg, pose)
        H = channel_matrix(cfg, pose, res.lens)
        est = ber_monte_carlo(H, cfg.signal_set, cfg.gsm, args.trials, np.random.default_rng(cfg.seed))
        lens = res.lens
        print(f"\n[{scheme}] f={lens.f:.5g} m, theta_L={np.rad2deg(lens.theta_L):.4g} deg, "
              f"phi_L={np.rad2deg(lens.phi_L):.4g} deg, clamped={list(res.clamp_flags)}")
        print(f"bound={ber_upper_bound(H, cfg.signal_set, cfg.gsm):.6g}  "
              f"ber={est.value:.6g} +/- {est.std_error:.2g} ({est.trials} uses)")
        print("H (rows: PDs, cols: LEDs) =")
        print(H)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = _load(args)
    if args.command == "orientation-sweep":
        rows = run_orientation_sweep(cfg, args.sigma2, args.schemes or ["exhaustive", "cls", "vulo", "static"],
                                     draws=args.draws, trials=args.trials, workers=args.workers,
                                     per_draw=args.per_draw)
        _write(rows, args)
    elif args.command == "dtx-sweep":
        rows = run_dtx_sweep(cfg, args.dtx, variants=args.variant, sigma2=args.sigma2, n_a=args.n_a,
                             schemes=args.schemes or ["cls"], draws=args.draws, trials=args.trials,
                             workers=args.workers, per_draw=args.per_draw)
        _write(rows, args)
    elif args.command == "single":
        _single(cfg, args)
    elif args.command == "validate":
        from .validate import run_all

        failed = 0
        for name, ok, detail in run_all(cfg, args.seed):
            print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
            failed += not ok
        return 1 if failed else 0
    return 0


if __name__ == "__main__":
    sys.exit(main())
