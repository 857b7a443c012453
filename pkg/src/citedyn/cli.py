"""Command-line entry point.

Subcommands: simulate (ensemble -> trajectories + summary), refmodel
(reference age profiles), duality (mean citation curves), continuum
(lifetime / critical-fitness sweeps), validate (metric battery on a fresh
simulation), replay (metric battery on an ingested trajectory CSV).

Configuration precedence: command-line flags > CITEDYN_* environment
variables > key=value params file > built-in Physics-1984 defaults.  All
randomness flows from the single --seed value; outputs embed the resolved
configuration so that any artifact can be reproduced from its own header.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import continuum, curves as curves_mod, duality, io as io_mod, metrics, refmodel
from .params import ModelParams, load_params, with_overrides
from .simulate import backend, simulate_ensemble

ENV_PREFIX = "CITEDYN_"


class CliError(Exception):
    pass


def _env(name, cast, default=None):
    raw = os.environ.get(ENV_PREFIX + name.upper())
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError as exc:
        raise CliError(f"bad {ENV_PREFIX}{name.upper()}={raw!r}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="citedyn",
        description="Stochastic citation-network growth: simulation and validation.")
    parser.add_argument("--version", action="store_true", help="print version and backend")
    sub = parser.add_subparsers(dest="command")

    def common(p, n_default=40195):
        p.add_argument("--params", type=Path, default=_env("params", Path),
                       help="key=value params file")
        p.add_argument("--curves", type=Path, default=_env("curves", Path),
                       help="curves CSV (t,m_dir,F,r_dir,r)")
        p.add_argument("--seed", type=int, default=_env("seed", int, 42),
                       help="master seed (default 42)")
        p.add_argument("--n", type=int, default=_env("n", int, n_default),
                       help="ensemble size")
        p.add_argument("--horizon", type=int, default=_env("horizon", int, 25),
                       help="simulated years")
        p.add_argument("--snapshots", type=str, default=_env("snapshots", str),
                       help="comma-separated snapshot years")
        p.add_argument("--workers", type=int, default=_env("workers", int, 1))
        p.add_argument("--out", type=Path, default=_env("out", Path, Path(".")),
                       help="output directory")

    common(sub.add_parser("simulate", help="simulate an ensemble"))
    p = sub.add_parser("validate", help="simulate and run the metric battery")
    common(p)
    p.add_argument("--bands", type=Path, default=None,
                   help="JSON file overriding metric bands")

    p = sub.add_parser("replay", help="metric battery on an ingested trajectory CSV")
    p.add_argument("trajectories", type=Path)
    p.add_argument("--out", type=Path, default=_env("out", Path, Path(".")))
    p.add_argument("--bands", type=Path, default=None,
                   help="JSON file overriding metric bands")

    p = sub.add_parser("refmodel", help="reference age profiles from the copy recursion")
    p.add_argument("--params", type=Path, default=_env("params", Path))
    p.add_argument("--curves", type=Path, default=_env("curves", Path))
    p.add_argument("--horizon", type=int, default=_env("horizon", int, 30))
    p.add_argument("--kernel-scale", type=float, default=None,
                   help="override T(1); 0 disables copying")
    p.add_argument("--out", type=Path, default=_env("out", Path, Path(".")))

    p = sub.add_parser("duality", help="mean citation curve from the reference profile")
    p.add_argument("--params", type=Path, default=_env("params", Path))
    p.add_argument("--curves", type=Path, default=_env("curves", Path))
    p.add_argument("--out", type=Path, default=_env("out", Path, Path(".")))

    p = sub.add_parser("continuum", help="lifetime and runaway sweeps")
    p.add_argument("--params", type=Path, default=_env("params", Path))
    p.add_argument("--eta-max", type=float, default=40.0)
    p.add_argument("--out", type=Path, default=_env("out", Path, Path(".")))
    return parser


def _resolve(args) -> tuple[ModelParams, curves_mod.EmpiricalCurves, dict]:
    params = load_params(args.params) if getattr(args, "params", None) else ModelParams()
    horizon = getattr(args, "horizon", None)
    if horizon is not None and horizon > params.horizon:
        params = with_overrides(params, horizon=horizon)
    curves = (curves_mod.load_curves(args.curves) if getattr(args, "curves", None)
              else curves_mod.default_curves(max(params.horizon, curves_mod.DEFAULT_HORIZON)))
    # worker count is an execution detail, not configuration: results are
    # bit-identical for any value, so it stays out of the embedded config
    config = {"command": args.command, "backend": backend()}
    config.update({f"param_{k}": v for k, v in params.as_dict().items()})
    for key in ("seed", "n", "horizon", "snapshots"):
        if getattr(args, key, None) is not None:
            config[key] = getattr(args, key)
    for key in ("params", "curves"):
        if getattr(args, key, None):
            config[f"{key}_file"] = str(getattr(args, key))
    return params, curves, config


def _snapshot_years(args, horizon):
    if getattr(args, "snapshots", None):
        try:
            years = sorted({int(s) for s in str(args.snapshots).split(",") if s.strip()})
        except ValueError as exc:
            raise CliError(f"bad --snapshots {args.snapshots!r}: {exc}") from exc
    else:
        years = sorted({min(2, horizon), min(5, horizon), min(10, horizon), horizon})
    return years


def _cmd_simulate(args) -> int:
    params, curves, config = _resolve(args)
    years = _snapshot_years(args, args.horizon)
    result = simulate_ensemble(args.n, params, curves, args.seed,
                               snapshot_years=years, horizon=args.horizon,
                               workers=args.workers)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    io_mod.write_trajectories(result, out / "trajectories.csv", config)
    io_mod.write_summary(result.summary, out / "summary.json", config)
    print(f"simulated {args.n} papers over {args.horizon} years "
          f"(seed {args.seed}, backend {backend()}) -> {out}")
    return 0


def _cmd_validate(args) -> int:
    params, curves, config = _resolve(args)
    result = simulate_ensemble(args.n, params, curves, args.seed,
                               snapshot_years=[args.horizon], horizon=args.horizon,
                               workers=args.workers)
    bands = _load_bands(args)
    report = metrics.validation_report(result, bands=bands)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    io_mod.write_report(report, out / "validation.json", config)
    io_mod.write_metric_csvs(result, out, config)
    _print_report(report)
    return 0 if report["pass"] else 3


def _load_bands(args):
    if getattr(args, "bands", None):
        with open(args.bands) as fh:
            return json.load(fh)
    return None


def _cmd_replay(args) -> int:
    result = io_mod.ingest_trajectories(args.trajectories)
    report = metrics.validation_report(result, bands=_load_bands(args))
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    config = {"command": "replay", "source": str(args.trajectories)}
    io_mod.write_report(report, out / "validation.json", config)
    io_mod.write_metric_csvs(result, out, config)
    _print_report(report)
    return 0 if report["pass"] else 3


def _print_report(report: dict) -> None:
    for name, check in report["checks"].items():
        status = "PASS" if check["pass"] else "FAIL"
        print(f"[{status}] {name}: {check['value']} (band {check['band']})")
    print("overall:", "PASS" if report["pass"] else "FAIL")


def _cmd_refmodel(args) -> int:
    params, curves, config = _resolve(args)
    horizon = min(args.horizon, curves.horizon)
    T = curves_mod.reference_kernel(horizon, curves.R0)
    if args.kernel_scale is not None:
        T = (T / T[0] * args.kernel_scale) if args.kernel_scale > 0 else np.zeros(horizon)
    profile = refmodel.compute_indirect_reduced(curves.r_dir, T, horizon)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    refmodel.save_profile(profile, out / "reference_profile.csv", config)
    print(f"indirect share {profile.indirect_share:.3f} over {horizon} years -> {out}")
    return 0


def _cmd_duality(args) -> int:
    params, curves, config = _resolve(args)
    curve = duality.r_to_M(curves.r, curves.r_dir, curves.R0, params.growth_exponent)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    duality.save_mean_curve(curve, out / "mean_citation_curve.csv", config)
    report = duality.tail_convergence_report(curves.r, params.growth_exponent,
                                             tail_exponent=1.5)
    io_mod.write_report(report, out / "tail_convergence.json", config)
    print(f"M(t) over {curve.horizon} years, growth exponent "
          f"{params.growth_exponent} -> {out}")
    return 0


def _cmd_continuum(args) -> int:
    params, _, config = _resolve(args)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    K_grid = np.unique(np.geomspace(1, 1500, 80).astype(int))
    tau = continuum.lifetime_sweep(params, K_grid)
    continuum.save_lifetime_csv(K_grid, tau, out / "lifetime.csv", config)
    etas = np.linspace(0.5, args.eta_max, 80)
    rows = [(eta, continuum.cumulative_approx(eta, params, params.horizon))
            for eta in etas]
    continuum.save_regime_csv(rows, out / "regimes.csv", config)
    eta_crit, K_at_max = continuum.eta_critical(params)
    crossing = continuum.runaway_crossing(params)
    print(f"eta_crit={eta_crit:.3f} at K={K_at_max:.1f}; "
          f"lifetime diverges at K={crossing:.1f} -> {out}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "validate": _cmd_validate,
    "replay": _cmd_replay,
    "refmodel": _cmd_refmodel,
    "duality": _cmd_duality,
    "continuum": _cmd_continuum,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.version:
        from . import __version__
        print(f"citedyn {__version__} (backend: {backend()})")
        return 0
    if not args.command:
        parser.print_help()
        return 2
    try:
        return _COMMANDS[args.command](args)
    except (CliError, ValueError, OSError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
