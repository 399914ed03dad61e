"""Command-line interface: validation sweeps, bound queries, quadrotor runs.

Exit codes: 0 success (including expected divergence past t_lim), 2 config
error, 3 numerical failure (solver non-convergence, or divergence before
t_lim).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .analysis import attitude_bounds, controllability_at_state, spectral_norm
from .attitude import TruncationConfig, build_attitude_ladder
from .errors import ConfigError, KoopliftError, NoConvergence, NonFiniteState, NotStabilizable
from .harness import ScenarioConfig, apply_overrides, emit_results, run_scenario
from .presets import list_presets, load_preset, load_quad_preset, preset_dict
from .quadrotor import QuadRunConfig, emit_quad_results, run_quad_tracking
from .rigidbody import BodyParams, RigidBodyState


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _parse_overrides(pairs):
    out = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ConfigError(f"override {pair!r} is not key=value")
        key, _, value = pair.partition("=")
        out[key.strip()] = _parse_value(value.strip())
    return out


def _load_scenario(args) -> ScenarioConfig:
    if args.preset and args.config:
        raise ConfigError("give either --preset or --config, not both")
    if args.preset:
        cfg = load_preset(args.preset)
    elif args.config:
        cfg = ScenarioConfig.from_toml(args.config)
    else:
        raise ConfigError("one of --preset or --config is required")
    overrides = _parse_overrides(args.set)
    if overrides:
        cfg = apply_overrides(cfg, overrides)
    return cfg


def _vec3(text: str) -> np.ndarray:
    parts = [float(p) for p in text.split(",")]
    if len(parts) == 1:
        parts = parts * 3
    if len(parts) != 3:
        raise ConfigError(f"expected 1 or 3 comma-separated values, got {text!r}")
    return np.array(parts)


def _inertia_params(name_or_diag: str, mass: float) -> BodyParams:
    from .harness import NAMED_INERTIAS

    if name_or_diag in NAMED_INERTIAS:
        diag = NAMED_INERTIAS[name_or_diag]
    else:
        diag = _vec3(name_or_diag)
    return BodyParams(J=np.diag(np.asarray(diag, float)), m=mass)


def _cmd_validate(args, kind: str) -> int:
    cfg = _load_scenario(args)
    if cfg.kind != kind:
        raise ConfigError(f"scenario {cfg.name!r} has kind {cfg.kind!r}; expected {kind!r}")
    result = run_scenario(cfg, jobs=args.jobs)
    files = emit_results(result, args.out)

    failed_early = False
    rows = []
    for run in result.runs:
        err = run.error
        div = err.divergence_time
        if div is not None and result.t_lim is not None and div < result.t_lim:
            failed_early = True
        rows.append({
            "truncation": run.label,
            "max_e_nu_pct": err.maxima.get("e_nu_pct"),
            "max_e_z_pct": err.maxima.get("e_z_pct"),
            "tot": err.tot,
            "onset_time": err.onset_time,
            "divergence_time": div,
            "t_lim_M": run.t_lim_M,
        })

    if args.json:
        print(json.dumps({
            "scenario": cfg.name,
            "t_lim": result.t_lim,
            "dt": result.dt,
            "horizon": result.horizon,
            "rows": rows,
            "files": [str(f) for f in files],
        }, indent=2, sort_keys=True))
    else:
        tl = "inf" if result.t_lim is None else f"{result.t_lim:.6g} s"
        print(f"scenario {cfg.name}: t_lim = {tl}, dt = {result.dt:g}, "
              f"horizon = {result.horizon:g} s")
        hdr = f"{'trunc':>10} {'max e_nu%':>12} {'max e_z%':>12} {'tot':>12} " \
              f"{'onset':>10} {'diverged':>10}"
        print(hdr)
        for row in rows:
            def fmt(x, w=12):
                return f"{'-':>{w}}" if x is None else f"{x:>{w}.4g}"

            print(f"{row['truncation']:>10} {fmt(row['max_e_nu_pct'])} "
                  f"{fmt(row['max_e_z_pct'])} {fmt(row['tot'])} "
                  f"{fmt(row['onset_time'], 10)} {fmt(row['divergence_time'], 10)}")
        print(f"wrote {len(files)} files to {args.out}")
    if failed_early:
        raise NonFiniteState(0.0, "a lifted run diverged before t_lim")
    return 0


def _cmd_bounds(args) -> int:
    params = _inertia_params(args.inertia, args.mass)
    nu0 = _vec3(args.nu)
    gamma0 = params.J @ nu0
    gn = float(np.linalg.norm(gamma0))
    rep = attitude_bounds(params, gn, float(np.linalg.norm(nu0)), args.K,
                          torque_norm=args.torque_norm)
    ladder = build_attitude_ladder(nu0, params, args.K + 1)
    payload = {
        "inertia": args.inertia,
        "nu0": nu0.tolist(),
        "iota": rep.iota,
        "gamma_norm": rep.gamma_norm,
        "t_lim": rep.t_lim,
        "bounds": [
            {
                "k": k,
                "nu_exact": float(np.linalg.norm(ladder.nu[k])),
                "nu_bound": float(rep.bound_nu[k]),
                "H_exact": float(spectral_norm(ladder.H[k])),
                "H_bound": float(rep.bound_H[k]),
                "nu_relaxed": float(rep.relaxed_nu[k]),
            }
            for k in range(args.K + 1)
        ],
    }
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"t_lim = {rep.t_lim:.6g} s  (iota = {rep.iota:.6g}, "
              f"|gamma0| = {rep.gamma_norm:.6g})")
        print(f"{'k':>3} {'|nu_k|':>12} {'bound':>12} {'|H_k|':>12} {'bound':>12} "
              f"{'relaxed nu':>12}")
        for row in payload["bounds"]:
            print(f"{row['k']:>3} {row['nu_exact']:>12.4e} {row['nu_bound']:>12.4e} "
                  f"{row['H_exact']:>12.4e} {row['H_bound']:>12.4e} "
                  f"{row['nu_relaxed']:>12.4e}")
    return 0


def _cmd_controllability(args) -> int:
    params = _inertia_params(args.inertia, args.mass)
    cfg = TruncationConfig(N_nu=args.n_nu, N_z=args.n_z)
    rng = np.random.default_rng(args.seed)
    results = []
    if args.samples > 0:
        for _ in range(args.samples):
            direction = rng.normal(size=3)
            direction /= np.linalg.norm(direction)
            nu = rng.uniform(0.05, 1.0) * direction
            s = RigidBodyState(p=rng.uniform(-2, 2, 3), v=rng.uniform(-1, 1, 3),
                               R=np.eye(3), nu=nu)
            results.append(controllability_at_state(s, params, cfg))
    else:
        s = RigidBodyState(p=np.zeros(3), v=np.zeros(3), R=np.eye(3), nu=_vec3(args.nu))
        results.append(controllability_at_state(s, params, cfg))
    ranks = [r.rank for r in results]
    full = [r.full_rank for r in results]
    payload = {
        "N_nu": args.n_nu,
        "N_z": args.n_z,
        "samples": len(results),
        "ranks": sorted(set(ranks)),
        "all_full_rank": all(full),
        "tolerance": results[0].tolerance,
    }
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        verdict = "full rank" if all(full) else f"rank deficient (ranks {sorted(set(ranks))})"
        print(f"N_nu={args.n_nu} N_z={args.n_z}: {verdict} over {len(results)} state(s); "
              f"tolerance {results[0].tolerance:.3e}")
    return 0


def _cmd_simulate_quad(args) -> int:
    if args.preset:
        cfg = load_quad_preset(args.preset)
    elif args.config:
        d = preset_dict_from_file(args.config)
        cfg = QuadRunConfig.from_dict(d)
    else:
        cfg = QuadRunConfig()
    overrides = _parse_overrides(args.set)
    if overrides:
        d = cfg.to_dict()
        for key, value in overrides.items():
            if key not in d:
                raise ConfigError(f"unknown override key {key!r}")
            d[key] = value
        cfg = QuadRunConfig.from_dict(d)
    log, ctrl = run_quad_tracking(cfg)
    files = emit_quad_results(cfg, log, ctrl, args.out)
    err = log.tracking_error
    res = log.residual_pct[np.isfinite(log.residual_pct)]
    payload = {
        "max_tracking_error": float(np.max(err)),
        "corner_errors": log.corner_errors().tolist(),
        "thrust_range": [float(np.min(log.zeta[:, 0])), float(np.max(log.zeta[:, 0]))],
        "max_torque_norm": float(np.max(np.linalg.norm(log.zeta[:, 1:4], axis=1))),
        "residual_pct_p95": float(np.percentile(res, 95.0)),
        "riccati_residual": ctrl.residual,
        "closed_loop_abscissa": ctrl.closed_loop_abscissa,
        "files": [str(f) for f in files],
    }
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"square {cfg.side} m / {cfg.total_T} s:")
        print(f"  max tracking error  {payload['max_tracking_error']:.4g} m")
        print(f"  corner errors       {[f'{e:.4g}' for e in payload['corner_errors']]}")
        print(f"  thrust range        [{payload['thrust_range'][0]:.4g}, "
              f"{payload['thrust_range'][1]:.4g}] N")
        print(f"  max |M|             {payload['max_torque_norm']:.4g} N m")
        print(f"  recovery res p95    {payload['residual_pct_p95']:.4g}")
        print(f"  riccati residual    {payload['riccati_residual']:.3e}")
        print(f"  closed-loop absc.   {payload['closed_loop_abscissa']:.4g}")
        print(f"wrote {len(files)} files to {args.out}")
    return 0


def preset_dict_from_file(path):
    import sys as _sys

    if _sys.version_info >= (3, 11):
        import tomllib as _toml
    else:
        import tomli as _toml
    with open(path, "rb") as fh:
        d = _toml.load(fh)
    d.pop("kind", None)
    return d


def _cmd_presets(args) -> int:
    names = list_presets()
    if args.json:
        print(json.dumps({name: preset_dict(name) for name in names}, indent=2,
                         sort_keys=True))
    else:
        for name in names:
            d = preset_dict(name)
            kind = d.get("kind", "attitude")
            inertia = d.get("inertia", "-")
            print(f"{name:>12}  kind={kind:<8} inertia={inertia}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kooplift",
        description="Koopman-lifted rigid-body dynamics: validation and control runs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_scenario_flags(p):
        p.add_argument("--preset", help="shipped scenario name (see `kooplift presets`)")
        p.add_argument("--config", help="scenario TOML file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="dotted-path override, e.g. torque.alpha=1e-4")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--jobs", type=int, default=1, help="parallel truncation runs")
        p.add_argument("--json", action="store_true", help="machine-readable summary")

    p = sub.add_parser("validate-attitude", help="attitude-only validation sweep")
    add_scenario_flags(p)
    p = sub.add_parser("validate-full", help="combined attitude+position validation")
    add_scenario_flags(p)

    p = sub.add_parser("bounds", help="ladder norm bounds and t_lim")
    p.add_argument("--inertia", default="J0", help="named inertia or d1,d2,d3")
    p.add_argument("--nu", default="0.001", help="initial rate (scalar or 3 values)")
    p.add_argument("--mass", type=float, default=1.2)
    p.add_argument("--K", type=int, default=8, help="highest ladder order")
    p.add_argument("--torque-norm", type=float, default=0.0)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("controllability", help="last-Jordan-row rank check")
    p.add_argument("--inertia", default="J0")
    p.add_argument("--mass", type=float, default=1.2)
    p.add_argument("--n-nu", type=int, default=4)
    p.add_argument("--n-z", type=int, default=4)
    p.add_argument("--nu", default="0.1", help="rate for a single-state check")
    p.add_argument("--samples", type=int, default=0,
                   help="number of random states (0 = use --nu)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("simulate-quad", help="closed-loop square-tracking run")
    p.add_argument("--preset", help="quad preset name (quad_square)")
    p.add_argument("--config", help="quad-run TOML file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("presets", help="list shipped scenarios")
    p.add_argument("--json", action="store_true")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "validate-attitude":
            return _cmd_validate(args, "attitude")
        if args.command == "validate-full":
            return _cmd_validate(args, "full")
        if args.command == "bounds":
            return _cmd_bounds(args)
        if args.command == "controllability":
            return _cmd_controllability(args)
        if args.command == "simulate-quad":
            return _cmd_simulate_quad(args)
        if args.command == "presets":
            return _cmd_presets(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NoConvergence, NotStabilizable, NonFiniteState) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except KoopliftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
