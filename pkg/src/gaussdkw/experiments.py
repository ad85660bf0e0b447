"""Seeded Monte Carlo experiment drivers.

Each driver is a pure function of its configuration: per-trial seeds are
derived from (base_seed, trial index) through the counter-hash contract, so
reruns are bit-identical at any thread count and any single trial can be
replayed in isolation.  Absolute constants of the deviation bounds are
treated as measured outputs; pass/fail thresholds live in the test-suite as
calibrated fixtures, never here.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from gaussdkw.analytic import build_quantile_grid, sigma2, std_normal_cdf
from gaussdkw.complexity import gamma_upper
from gaussdkw.empirical import draw_sample, uniform_envelope_check
from gaussdkw.errors import ConfigError, DomainError
from gaussdkw.pointsets import (
    UnitPointSet,
    load_pointset_csv,
    make_cap,
    make_density_example,
    make_sphere_grid,
)
from gaussdkw.rng import counter_uniforms, derive_seed
from gaussdkw.tables import Table
from gaussdkw.transport import coordinate_stat_directions, w2_directions

EXPERIMENT_NAMES = ("dkw_envelope", "sudakov", "counterexample", "matrix_structure",
                    "single_t_lower", "wasserstein_scaling")


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully-resolved experiment parameters (flat JSON keys map 1:1 to fields)."""

    experiment: str
    base_seed: int = 0
    trials: int = 1
    m: int | None = None
    d: int | None = None
    delta: float | None = None
    c_env: float | None = None
    set_spec: dict | None = None
    output_path: str | None = None
    t: float | None = None
    kappa: float | None = None
    cover_delta: float | None = None
    m_sweep: list[int] | None = None
    delta_sweep: list[float] | None = None
    threads: int = 1

    def require(self, *names: str) -> None:
        for name in names:
            if getattr(self, name) is None:
                raise ConfigError(
                    f"experiment {self.experiment!r}: missing config key '{name}'")


_FIELD_NAMES = {f.name for f in fields(ExperimentConfig)}


def config_from_dict(raw: dict) -> ExperimentConfig:
    unknown = sorted(set(raw) - _FIELD_NAMES)
    if unknown:
        raise ConfigError(f"unknown config key '{unknown[0]}'")
    if "experiment" not in raw:
        raise ConfigError("missing config key 'experiment'")
    cfg = ExperimentConfig(**raw)
    if cfg.experiment not in EXPERIMENT_NAMES:
        raise ConfigError(f"unknown experiment '{cfg.experiment}'")
    if cfg.trials < 1:
        raise ConfigError(f"trials must be >= 1, got {cfg.trials}")
    if cfg.delta is not None and not (0.0 < cfg.delta <= 0.1):
        raise ConfigError(f"delta must be in (0, 1/10] for experiments, got {cfg.delta}")
    if cfg.threads < 1:
        raise ConfigError(f"threads must be >= 1, got {cfg.threads}")
    return cfg


def resolve_point_set(spec: dict) -> UnitPointSet:
    """Build the point set described by a set_spec mapping.

    kinds: sphere (d, n, seed), cap (d, n, seed), density_example (d, delta),
    single (d; the first basis vector), csv (path).
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("set_spec must be a mapping with a 'kind' key")
    kind = spec["kind"]
    known = {
        "sphere": {"kind", "d", "n", "seed"},
        "cap": {"kind", "d", "n", "seed"},
        "density_example": {"kind", "d", "delta"},
        "single": {"kind", "d"},
        "csv": {"kind", "path"},
    }
    if kind not in known:
        raise ConfigError(f"unknown set_spec kind '{kind}'")
    unknown = sorted(set(spec) - known[kind])
    if unknown:
        raise ConfigError(f"unknown set_spec key '{unknown[0]}'")
    if kind == "sphere":
        return make_sphere_grid(int(spec["d"]), int(spec["n"]), int(spec.get("seed", 0)))
    if kind == "cap":
        return make_cap(int(spec["d"]), int(spec["n"]), int(spec.get("seed", 0)))
    if kind == "density_example":
        return make_density_example(int(spec["d"]), float(spec["delta"]))
    if kind == "single":
        d = int(spec["d"])
        pts = np.zeros((1, d))
        pts[0, 0] = 1.0
        return UnitPointSet(dim=d, points=pts, symmetric=False, label="single(e1)")
    return load_pointset_csv(spec["path"])


@dataclass(frozen=True)
class TrialOutcome:
    trial_index: int
    seed: int
    violated: bool
    auxiliary: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ExperimentResult:
    name: str
    summary: dict
    tables: dict[str, Table]
    outcomes: list[TrialOutcome]


def _run_trials(trials: int, threads: int, worker) -> list:
    if threads <= 1:
        return [worker(i) for i in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, range(trials)))


# ---------------------------------------------------------------------------
# envelope experiment


def run_dkw_envelope(cfg: ExperimentConfig) -> ExperimentResult:
    """Violation rate of the scaled envelope c_env (delta + sigma sqrt(delta))."""
    cfg.require("m", "delta", "c_env", "set_spec")
    a = resolve_point_set(cfg.set_spec)
    g1 = gamma_upper(a, 1.0)
    deltas = cfg.delta_sweep if cfg.delta_sweep else [cfg.delta]
    for dv in deltas:
        if not (0.0 < dv <= 0.1):
            raise ConfigError(f"delta_sweep entry {dv} outside (0, 1/10]")
    outcome_rows: list[list] = []
    rate_rows: list[list] = []
    outcomes: list[TrialOutcome] = []
    for dv in deltas:
        def worker(i: int, dv=dv):
            seed = derive_seed(cfg.base_seed, i)
            g = draw_sample(cfg.m, a.dim, seed)
            res = uniform_envelope_check(g, a, dv, cfg.c_env)
            return i, seed, res
        results = _run_trials(cfg.trials, cfg.threads, lambda i: worker(i))
        violated = 0
        for i, seed, res in results:
            violated += int(res.violated)
            w = res.worst
            outcome_rows.append([i, seed, float(dv), res.violated, w.ks_sup,
                                 w.scale_sensitive_sup, w.envelope_ratio,
                                 w.direction_index, w.envelope_arg_t])
            outcomes.append(TrialOutcome(trial_index=i, seed=seed, violated=res.violated,
                                         auxiliary={"delta": float(dv),
                                                    "envelope_ratio": w.envelope_ratio}))
        rate = violated / cfg.trials
        rate_rows.append([float(dv), cfg.m, float(dv) * cfg.m, float(cfg.c_env),
                          rate, cfg.trials])
    summary = {
        "experiment": "dkw_envelope",
        "violation_rates": {repr(float(dv)): row[4] for dv, row in zip(deltas, rate_rows)},
        "gamma1_upper": g1,
        "hypothesis_m_ge_gamma1": bool(cfg.m >= g1),
        "set_label": a.label,
        "set_size": a.n,
    }
    tables = {
        "outcomes": Table(schema="outcomes",
                          header=["trial", "seed", "delta", "violated", "ks_sup",
                                  "ss_sup", "envelope_ratio", "worst_direction",
                                  "worst_t"],
                          rows=outcome_rows),
        "violation_rate": Table(schema="violation_rate",
                                header=["delta", "m", "delta_m", "c_env", "rate",
                                        "trials"],
                                rows=rate_rows),
    }
    return ExperimentResult(name="dkw_envelope", summary=summary, tables=tables,
                            outcomes=outcomes)


# ---------------------------------------------------------------------------
# single-scale entropy lower bound


def run_sudakov(cfg: ExperimentConfig) -> ExperimentResult:
    """Mean sup deviation at t = 0 over a separated subset of the input set,
    compared against the single-scale entropy bound sqrt(cover_delta * log N_hat / m).
    """
    from gaussdkw.pointsets import make_separated_subset

    cfg.require("m", "cover_delta", "set_spec")
    a = resolve_point_set(cfg.set_spec)
    sep = make_separated_subset(a, cfg.cover_delta)
    n_hat = sep.n
    degenerate = n_hat <= 1
    lower = math.sqrt(cfg.cover_delta * math.log(max(n_hat, 2)) / cfg.m) \
        if not degenerate else math.sqrt(cfg.cover_delta * math.log(2.0) / cfg.m)

    def worker(i: int):
        seed = derive_seed(cfg.base_seed, i)
        g = draw_sample(cfg.m, sep.dim, seed)
        frac = np.mean(g.entries @ sep.points.T <= 0.0, axis=0)
        return i, seed, float(np.max(np.abs(frac - 0.5)))

    results = _run_trials(cfg.trials, cfg.threads, worker)
    sups = np.array([r[2] for r in results])
    estimate = float(np.mean(sups))
    hypothesis = cfg.m >= max(1.0 / cfg.cover_delta**2,
                              math.log(max(n_hat, 2)) / cfg.cover_delta)
    summary = {
        "experiment": "sudakov",
        "estimate": estimate,
        "lower_bound": lower,
        "ratio": estimate / lower,
        "n_hat": n_hat,
        "degenerate_subset": degenerate,
        "hypothesis_m_large_enough": bool(hypothesis),
        "set_label": a.label,
    }
    rows = [[r[0], r[1], r[2]] for r in results]
    tables = {"outcomes": Table(schema="sudakov", header=["trial", "seed", "sup_dev"],
                                rows=rows)}
    outcomes = [TrialOutcome(trial_index=r[0], seed=r[1], violated=False,
                             auxiliary={"sup_dev": r[2]}) for r in results]
    return ExperimentResult(name="sudakov", summary=summary, tables=tables,
                            outcomes=outcomes)


# ---------------------------------------------------------------------------
# sign-vector counterexample


def _binomial_tail_at_least(m: int, k: int) -> float:
    """P(Bin(m, 1/2) >= k), exact via log-binomial sums."""
    total = 0.0
    for j in range(k, m + 1):
        total += math.exp(math.lgamma(m + 1) - math.lgamma(j + 1)
                          - math.lgamma(m - j + 1) - m * math.log(2.0))
    return min(total, 1.0)


def counterexample_oracle(m: int, d: int) -> float:
    """Analytic success probability: binomial tail times the coupon factor."""
    size_i = max(int(0.4 * m), 1)
    p_first = _binomial_tail_at_least(m, size_i)
    p_second = 1.0 - (1.0 - 2.0 ** (-size_i)) ** (d - 1)
    return p_first * p_second


def run_counterexample(cfg: ExperimentConfig) -> ExperimentResult:
    """Success rate of the exact two-stage event for sign vectors.

    X is uniform on {-1,1}^d (the one experiment that is not Gaussian).  A
    trial succeeds when the 0.4m indices with smallest first coordinate all
    have first coordinate -1 and some other coordinate k is -1 on all of
    them; on success the empirical CDF at -1 of the direction
    sqrt(1-delta^2) e_1 + delta e_k deviates from its true value 1/4 by at
    least 0.15.
    """
    cfg.require("m", "d")
    m, d = cfg.m, cfg.d
    if d < 2:
        raise ConfigError(f"counterexample: d must be >= 2, got {d}")
    delta = cfg.delta if cfg.delta is not None else 1.0 / (2.0 * math.log(d))
    if delta > 1.0 / (2.0 * math.log(d)) + 1e-12:
        raise ConfigError(
            f"counterexample: delta {delta} above 1/(2 log d) = {1.0 / (2.0 * math.log(d)):.6g}")
    size_i = max(int(0.4 * m), 1)

    def worker(i: int):
        seed = derive_seed(cfg.base_seed, i)
        u = counter_uniforms(seed, m * d).reshape(m, d)
        signs = np.where(u < 0.5, -1, 1).astype(np.int8)
        order = np.argsort(signs[:, 0], kind="stable")[:size_i]
        event1 = bool(np.all(signs[order, 0] == -1))
        event2 = bool(np.any(np.all(signs[order, 1:] == -1, axis=0)))
        # Raw sup deviation of F_{m,x}(-1) from 1/4 over the direction family.
        both_neg = ((signs[:, :1] == -1) & (signs[:, 1:] == -1)).mean(axis=0)
        sup_dev = float(np.max(np.abs(both_neg - 0.25)))
        return i, seed, event1 and event2, sup_dev

    results = _run_trials(cfg.trials, cfg.threads, worker)
    successes = sum(int(r[2]) for r in results)
    raw = sum(int(r[3] >= 0.1) for r in results)
    # Chaining-functional cross-check runs at a reduced dimension; the
    # construction at d = 20000 has ~d points and is too large to embed.
    d_check = min(d, 256)
    gamma1_check = gamma_upper(
        make_density_example(d_check, 1.0 / (2.0 * math.log(d_check))), 1.0)
    summary = {
        "experiment": "counterexample",
        "violation_probability": successes / cfg.trials,
        "raw_sup_violation_rate": raw / cfg.trials,
        "analytic_oracle": counterexample_oracle(m, d),
        "delta": delta,
        "i_size": size_i,
        "gamma1_upper_reduced_d": gamma1_check,
        "gamma1_check_d": d_check,
    }
    rows = [[r[0], r[1], r[2], r[3]] for r in results]
    tables = {"outcomes": Table(schema="counterexample",
                                header=["trial", "seed", "success", "sup_dev"],
                                rows=rows)}
    outcomes = [TrialOutcome(trial_index=r[0], seed=r[1], violated=r[2],
                             auxiliary={"sup_dev": r[3]}) for r in results]
    return ExperimentResult(name="counterexample", summary=summary, tables=tables,
                            outcomes=outcomes)


# ---------------------------------------------------------------------------
# sorted-coordinate and W2 scaling sweeps


def _scaling_sweep(cfg: ExperimentConfig, observable) -> ExperimentResult:
    cfg.require("m_sweep", "set_spec")
    a = resolve_point_set(cfg.set_spec)
    g1 = max(gamma_upper(a, 1.0), 1e-9)
    rows = []
    medians = []
    for mi, m in enumerate(cfg.m_sweep):
        qgrid = build_quantile_grid(m) if m >= 2 else None

        def worker(i: int, m=m, qgrid=qgrid):
            seed = derive_seed(cfg.base_seed, mi, i)
            g = draw_sample(m, a.dim, seed)
            return observable(g, a, qgrid)

        vals = np.array(_run_trials(cfg.trials, cfg.threads, worker))
        med = float(np.median(vals))
        medians.append(med)
        delta_nominal = g1 / m * math.log(math.e * m / g1) ** 3
        rows.append([m, delta_nominal, med])
    slope, intercept, residual = fit_scaling([float(m) for m in cfg.m_sweep], medians)
    summary = {
        "experiment": cfg.experiment,
        "slope": slope,
        "intercept": intercept,
        "residual": residual,
        "gamma1_upper": g1,
        "set_label": a.label,
        "medians": medians,
    }
    tables = {"scaling": Table(schema="scaling",
                               header=["m", "delta_nominal", "observed"], rows=rows)}
    return ExperimentResult(name=cfg.experiment, summary=summary, tables=tables,
                            outcomes=[])


def run_matrix_structure(cfg: ExperimentConfig) -> ExperimentResult:
    """Median over trials of sup_x rms((sorted projections) - quantile grid)."""
    def observable(g, a, qgrid):
        return float(np.max(coordinate_stat_directions(g, a, qgrid)))

    return _scaling_sweep(cfg, observable)


def run_wasserstein_scaling(cfg: ExperimentConfig) -> ExperimentResult:
    """Median over trials of sup_x W2(F_m_x, F)."""
    def observable(g, a, qgrid):
        return float(np.max(w2_directions(g, a)))

    return _scaling_sweep(cfg, observable)


# ---------------------------------------------------------------------------
# single-t lower bound


def run_single_t_lower(cfg: ExperimentConfig) -> ExperimentResult:
    """Rate of |F_m(t) - F(t)| >= kappa sigma(t) sqrt(delta) for one direction."""
    cfg.require("m", "delta", "t", "kappa")
    s2 = sigma2(cfg.t)
    if s2 < cfg.delta:
        raise ConfigError(
            f"single_t_lower: sigma2(t) = {s2:.6g} < delta = {cfg.delta}; "
            "outside the cancellation regime")
    threshold = cfg.kappa * math.sqrt(s2) * math.sqrt(cfg.delta)
    f_t = std_normal_cdf(cfg.t)

    def worker(i: int):
        seed = derive_seed(cfg.base_seed, i)
        g = draw_sample(cfg.m, 1, seed)
        dev = abs(float(np.mean(g.entries[:, 0] <= cfg.t)) - f_t)
        return i, seed, dev, dev >= threshold - 1e-12

    results = _run_trials(cfg.trials, cfg.threads, worker)
    rate = sum(int(r[3]) for r in results) / cfg.trials
    summary = {
        "experiment": "single_t_lower",
        "observed_rate": rate,
        "threshold": threshold,
        "probability_reference": 2.0 * math.exp(-cfg.delta * cfg.m),
        "sigma2_t": s2,
    }
    rows = [[r[0], r[1], r[2], r[3]] for r in results]
    tables = {"outcomes": Table(schema="single_t",
                                header=["trial", "seed", "deviation", "exceeded"],
                                rows=rows)}
    outcomes = [TrialOutcome(trial_index=r[0], seed=r[1], violated=r[3],
                             auxiliary={"deviation": r[2]}) for r in results]
    return ExperimentResult(name="single_t_lower", summary=summary, tables=tables,
                            outcomes=outcomes)


# ---------------------------------------------------------------------------
# log-log fits


def fit_scaling(xs: list[float], ys: list[float]) -> tuple[float, float, float]:
    """Least-squares line through (log x, log y); returns (slope, intercept, rms)."""
    if len(xs) < 3 or len(xs) != len(ys):
        raise DomainError(f"fit_scaling: need >= 3 points of equal length, "
                          f"got {len(xs)}, {len(ys)}")
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise DomainError("fit_scaling: inputs must be strictly positive")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid**2)))


RUNNERS = {
    "dkw_envelope": run_dkw_envelope,
    "sudakov": run_sudakov,
    "counterexample": run_counterexample,
    "matrix_structure": run_matrix_structure,
    "single_t_lower": run_single_t_lower,
    "wasserstein_scaling": run_wasserstein_scaling,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    return RUNNERS[cfg.experiment](cfg)
