"""Command-line interface.

Subcommands expose every analysis as a reproducible run: configuration is a
flat JSON object (unknown keys are fatal), `--override key=value` edits
apply after file parsing, and every run writes a `manifest.json` with the
fully-resolved configuration, package version, and base seed.  Rerunning
from a manifest reproduces outputs byte-for-byte at any thread count.

Exit codes: 0 success, 1 configuration error (offending key named on
stderr), 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

import gaussdkw
from gaussdkw import analytic as an
from gaussdkw import complexity as cx
from gaussdkw import pointsets as ps
from gaussdkw import tables
from gaussdkw.empirical import ProjectionSample, direction_report, draw_sample
from gaussdkw.errors import ConfigError
from gaussdkw.experiments import config_from_dict, resolve_point_set, run_experiment
from gaussdkw.rng import counter_uniforms
from gaussdkw.transport import w2_empirical_gaussian


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    if "config" in raw and "version" in raw:  # a manifest; rerun its config
        raw = raw["config"]
    return raw


def _parse_override(text: str) -> tuple[str, object]:
    if "=" not in text:
        raise ConfigError(f"override '{text}' is not of the form key=value")
    key, raw_value = text.split("=", 1)
    try:
        value = json.loads(raw_value)
    except json.JSONDecodeError:
        value = raw_value
    return key, value


def _apply_overrides(cfg: dict, overrides: list[str]) -> dict:
    cfg = dict(cfg)
    for item in overrides:
        key, value = _parse_override(item)
        if key.startswith("set_spec."):
            sub = dict(cfg.get("set_spec") or {})
            sub[key.split(".", 1)[1]] = value
            cfg["set_spec"] = sub
        else:
            cfg[key] = value
    return cfg


def _validate_keys(raw: dict, allowed: set[str], context: str) -> None:
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise ConfigError(f"{context}: unknown config key '{unknown[0]}'")


def _write_manifest(outdir: str, command: str, cfg: dict) -> None:
    tables.write_json(os.path.join(outdir, "manifest.json"), {
        "command": command,
        "config": cfg,
        "version": gaussdkw.__version__,
        "base_seed": cfg.get("base_seed"),
    })


# ---------------------------------------------------------------------------
# analytics check


def _cmd_analytics(args) -> int:
    u = counter_uniforms(20240, 10_000)
    u = 1e-8 + u * (1.0 - 2e-8)
    roundtrip = float(np.max(np.abs(an._cdf_array(an._quantile_array(u)) - u)))

    t_grid = np.linspace(-6.0, 6.0, 241)
    h = 1e-5
    fd = (an._cdf_array(t_grid + h) - an._cdf_array(t_grid - h)) / (2.0 * h)
    density_fd = float(np.max(np.abs(fd - an._density_array(t_grid))))

    t_band = np.linspace(1.0, 8.0, 351)
    eq = np.array([an.check_sigma_equivalence(float(t)) for t in t_band])
    sigma_band = (float(eq.min()), float(eq.max()))

    u_band = np.exp(np.linspace(math.log(1e-8), math.log(0.5), 400))
    db = np.array([an.check_density_bound(float(x)) for x in u_band])
    density_band = (float(db.min()), float(db.max()))

    reg = _regularity_constant()
    ratio_band = _sigma_ratio_band()
    prox = _lambda_eta_constant(1024)

    summary = {
        "roundtrip_max_error": roundtrip,
        "density_fd_max_error": density_fd,
        "sigma_equivalence_band": sigma_band,
        "sigma_equivalence_spread": sigma_band[1] / sigma_band[0],
        "density_bound_band": density_band,
        "regularity_constant": reg,
        "sigma_ratio_band": ratio_band,
        "lambda_eta_proximity_constant": prox,
    }
    if args.verbosity >= 1:
        for key, value in summary.items():
            print(f"{key}: {value}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        tables.write_json(os.path.join(args.out, "analytics.json"), summary)
        _write_manifest(args.out, "analytics check", {"base_seed": 20240})
    return 0


def _regularity_constant() -> float:
    worst = 0.0
    for t in np.linspace(0.0, 5.0, 201):
        s2 = an.sigma2(float(t))
        root = math.sqrt(math.log(1.0 / s2)) if s2 < 1.0 else 1.0
        xi = 0.1 / max(root, 1e-9)
        denom = xi * s2 * root if root > 0 else xi * s2
        for sign in (1.0, -1.0):
            gap = abs(an.std_normal_cdf(float(t) + sign * xi) - an.std_normal_cdf(float(t)))
            worst = max(worst, gap / denom)
    return worst


def _sigma_ratio_band() -> tuple[float, float]:
    lo, hi = math.inf, 0.0
    for t in np.linspace(1.0, 6.0, 101):
        for eta in np.linspace(1e-3, 1.0 / t**2, 25):
            r = an.sigma2(float(t + eta * t)) / an.sigma2(float(t))
            lo, hi = min(lo, r), max(hi, r)
    return lo, hi


def _lambda_eta_constant(m: int) -> float:
    q = an.build_quantile_grid(m)
    i = np.arange(2, m // 2 + 1)
    vals = (q.lambdas[i - 1] - q.etas[i - 1]) * i * np.sqrt(np.log(m / i))
    return float(np.max(np.abs(vals)))


# ---------------------------------------------------------------------------
# setgen / complexity


def _cmd_setgen(args) -> int:
    if args.kind in ("sphere", "cap"):
        if args.n is None:
            raise ConfigError(f"setgen {args.kind}: missing --n")
        maker = ps.make_sphere_grid if args.kind == "sphere" else ps.make_cap
        a = maker(args.d, args.n, args.seed)
    elif args.kind == "density-example":
        if args.delta is None:
            raise ConfigError("setgen density-example: missing --delta")
        a = ps.make_density_example(args.d, args.delta)
    else:
        raise ConfigError(f"setgen: unknown kind '{args.kind}'")
    ps.save_pointset_csv(a, args.out)
    tables.write_json(args.out + ".manifest.json", {
        "command": f"setgen {args.kind}",
        "config": {"kind": args.kind, "d": args.d, "n": args.n, "seed": args.seed,
                   "delta": args.delta, "out": args.out},
        "version": gaussdkw.__version__,
        "base_seed": args.seed,
    })
    if args.verbosity >= 1:
        print(f"wrote {a.n} points to {args.out}")
    return 0


def _cmd_complexity(args) -> int:
    a = ps.load_pointset_csv(args.set_csv)
    report = cx.complexity_report(a)
    text = report.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    if args.verbosity >= 1:
        print(text)
    return 0


# ---------------------------------------------------------------------------
# deviation / transport single runs


_DEVIATION_KEYS = {"m", "delta", "base_seed", "set_spec", "curve_points"}


def _cmd_deviation(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args.override)
    _validate_keys(cfg, _DEVIATION_KEYS, "deviation run")
    for key in ("m", "delta", "set_spec"):
        if key not in cfg:
            raise ConfigError(f"deviation run: missing config key '{key}'")
    a = resolve_point_set(cfg["set_spec"])
    seed = int(cfg.get("base_seed", 0))
    delta = float(cfg["delta"])
    g = draw_sample(int(cfg["m"]), a.dim, seed)
    proj = g.entries @ a.points.T
    rows = []
    reports = []
    for j in range(a.n):
        p = ProjectionSample(values=np.sort(proj[:, j]), direction_index=j)
        rep = direction_report(p, delta, include_transport=True)
        reports.append((p, rep))
        rows.append([0, seed, g.m, g.d, delta, j, rep.ks_sup, rep.ks_arg_t,
                     rep.scale_sensitive_sup, rep.ss_arg_t, rep.w2,
                     rep.coordinate_stat if rep.coordinate_stat is not None else 0.0])
    outdir = args.out_dir
    os.makedirs(outdir, exist_ok=True)
    tables.write_table(os.path.join(outdir, "deviation.csv"), tables.Table(
        schema="deviation",
        header=["trial", "seed", "m", "d", "delta", "direction_index", "ks_sup",
                "ks_arg_t", "ss_sup", "ss_arg_t", "w2", "coord_stat"],
        rows=rows))
    worst_j = int(np.argmax([rep.envelope_ratio for _, rep in reports]))
    _write_envelope_curve(reports[worst_j][0], delta,
                          int(cfg.get("curve_points", 801)),
                          os.path.join(outdir, "envelope.csv"))
    tables.write_json(os.path.join(outdir, "summary.json"), {
        "worst_direction": worst_j,
        "max_ks_sup": max(r.ks_sup for _, r in reports),
        "max_ss_sup": max(r.scale_sensitive_sup for _, r in reports),
        "max_w2": max(r.w2 for _, r in reports),
    })
    _write_manifest(outdir, "deviation run", cfg)
    return 0


def _write_envelope_curve(p: ProjectionSample, delta: float, n_curve: int,
                          path: str) -> None:
    grid = an.build_probability_grid(delta)
    lo = float(p.values.min()) - 0.5
    hi = float(p.values.max()) + 0.5
    t_eval = np.unique(np.concatenate([p.values, grid.t_values,
                                       np.linspace(lo, hi, n_curve)]))
    fm = np.searchsorted(p.values, t_eval, side="right") / p.m
    f_true = an._cdf_array(t_eval)
    dev = np.abs(fm - f_true)
    envelope = delta + np.sqrt(an._sigma2_array(t_eval) * delta)
    rows = [[float(t), float(d), float(e)] for t, d, e in zip(t_eval, dev, envelope)]
    tables.write_table(path, tables.Table(schema="envelope",
                                          header=["t", "abs_deviation", "envelope"],
                                          rows=rows))


_TRANSPORT_KEYS = {"m", "base_seed", "set_spec"}


def _cmd_transport(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args.override)
    _validate_keys(cfg, _TRANSPORT_KEYS, "transport run")
    for key in ("m", "set_spec"):
        if key not in cfg:
            raise ConfigError(f"transport run: missing config key '{key}'")
    a = resolve_point_set(cfg["set_spec"])
    seed = int(cfg.get("base_seed", 0))
    m = int(cfg["m"])
    g = draw_sample(m, a.dim, seed)
    proj = g.entries @ a.points.T
    qgrid = an.build_quantile_grid(m) if m >= 2 else None
    rows = []
    best = (None, -1.0)
    for j in range(a.n):
        p = ProjectionSample(values=np.sort(proj[:, j]), direction_index=j)
        rep = w2_empirical_gaussian(p)
        coord = rep.coordinate_stat if rep.coordinate_stat is not None else 0.0
        rows.append([j, rep.w2, coord])
        if rep.w2 > best[1]:
            best = ((p, rep), rep.w2)
    outdir = args.out_dir
    os.makedirs(outdir, exist_ok=True)
    tables.write_table(os.path.join(outdir, "transport.csv"), tables.Table(
        schema="transport", header=["direction_index", "w2", "coordinate_stat"],
        rows=rows))
    p, rep = best[0]
    if qgrid is not None:
        r_rows = [[i + 1, float(p.values[i]), float(qgrid.lambdas[i])]
                  for i in range(m)]
        tables.write_table(os.path.join(outdir, "rearrangement.csv"), tables.Table(
            schema="rearrangement", header=["i", "sorted_projection", "lambda"],
            rows=r_rows))
    c_rows = [[i + 1, float(c)] for i, c in enumerate(rep.per_cell_contributions)]
    tables.write_table(os.path.join(outdir, "cells.csv"), tables.Table(
        schema="cells", header=["i", "cell_contribution"], rows=c_rows))
    tables.write_json(os.path.join(outdir, "summary.json"), {
        "worst_direction": p.direction_index,
        "max_w2": best[1],
    })
    _write_manifest(outdir, "transport run", cfg)
    return 0


# ---------------------------------------------------------------------------
# experiments


def _cmd_experiment(args) -> int:
    raw = _apply_overrides(_load_config(args.config), args.override)
    raw.setdefault("experiment", args.name)
    if raw["experiment"] != args.name:
        raise ConfigError(
            f"experiment name '{args.name}' conflicts with config key "
            f"experiment='{raw['experiment']}'")
    if args.threads is not None:
        raw["threads"] = os.cpu_count() if args.threads == "auto" else int(args.threads)
    cfg = config_from_dict(raw)
    result = run_experiment(cfg)
    outdir = args.out_dir or cfg.output_path or "."
    os.makedirs(outdir, exist_ok=True)
    for name, table in result.tables.items():
        tables.write_table(os.path.join(outdir, f"{name}.csv"), table)
    tables.write_json(os.path.join(outdir, "summary.json"), result.summary)
    manifest_cfg = dict(raw)
    _write_manifest(outdir, f"experiment {args.name}", manifest_cfg)
    if args.verbosity >= 1:
        print(json.dumps(result.summary, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaussdkw")
    parser.add_argument("--verbosity", type=int, default=1,
                        help="0 silences result prints; files are always written")
    sub = parser.add_subparsers(dest="command", required=True)

    p_an = sub.add_parser("analytics", help="normal-CDF analytics sweeps")
    an_sub = p_an.add_subparsers(dest="subcommand", required=True)
    p_check = an_sub.add_parser("check", help="run the accuracy and ratio sweeps")
    p_check.add_argument("--out", default=None, help="directory for analytics.json")
    p_check.set_defaults(func=_cmd_analytics)

    p_set = sub.add_parser("setgen", help="emit a point-set CSV")
    p_set.add_argument("kind", choices=["sphere", "cap", "density-example"])
    p_set.add_argument("--d", type=int, required=True)
    p_set.add_argument("--n", type=int, default=None)
    p_set.add_argument("--seed", type=int, default=0)
    p_set.add_argument("--delta", type=float, default=None)
    p_set.add_argument("--out", required=True)
    p_set.set_defaults(func=_cmd_setgen)

    p_cx = sub.add_parser("complexity", help="covering/chaining functional report")
    cx_sub = p_cx.add_subparsers(dest="subcommand", required=True)
    p_rep = cx_sub.add_parser("report")
    p_rep.add_argument("set_csv")
    p_rep.add_argument("--out", default=None)
    p_rep.set_defaults(func=_cmd_complexity)

    p_dev = sub.add_parser("deviation", help="per-direction deviation statistics")
    dev_sub = p_dev.add_subparsers(dest="subcommand", required=True)
    p_devrun = dev_sub.add_parser("run")
    p_devrun.add_argument("--config", required=True)
    p_devrun.add_argument("--override", action="append", default=[])
    p_devrun.add_argument("--out-dir", default=".")
    p_devrun.set_defaults(func=_cmd_deviation)

    p_tr = sub.add_parser("transport", help="per-direction W2 and coordinate stats")
    tr_sub = p_tr.add_subparsers(dest="subcommand", required=True)
    p_trrun = tr_sub.add_parser("run")
    p_trrun.add_argument("--config", required=True)
    p_trrun.add_argument("--override", action="append", default=[])
    p_trrun.add_argument("--out-dir", default=".")
    p_trrun.set_defaults(func=_cmd_transport)

    p_ex = sub.add_parser("experiment", help="seeded Monte Carlo experiments")
    p_ex.add_argument("name")
    p_ex.add_argument("--config", required=True)
    p_ex.add_argument("--override", action="append", default=[])
    p_ex.add_argument("--out-dir", default=None)
    p_ex.add_argument("--threads", default=None)
    p_ex.set_defaults(func=_cmd_experiment)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
