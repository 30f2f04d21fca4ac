"""Command-line front end.

``spherelab <experiment> --config <path> [--seed N] [--trials N]
[--out <path>] [--format csv|json]``

Configs are flat INI files (``[system]`` plus one section per experiment);
flags override file values.  Every run writes the report table plus a JSON
sidecar carrying the fully resolved configuration; feeding that sidecar
back as ``--config`` reproduces the table byte for byte.  Output files are
staged to a temporary name and renamed, so failed runs leave nothing
behind.  The ``SPHERELAB_THREADS`` environment variable sets the default
worker count for the Monte Carlo runners.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
import time

import numpy as np

from . import analytic, montecarlo
from .decoder import NormKind, RestartSchedule
from .model import SystemConfig, make_constellation, make_rng, sigma2_from_snr_db

__all__ = ["main", "run"]

_VERSION = "0.1.0"

_NORM_NAMES = {"l2": NormKind.L2, "linf": NormKind.LINF, "ltilde": NormKind.LTILDEINF}
_NORM_LABELS = {v: k for k, v in _NORM_NAMES.items()}

EXPERIMENTS = (
    "error-rate",
    "complexity-vs-epsilon",
    "complexity-vs-level",
    "complexity-vs-snr",
    "tpb-report",
    "validate-cdfs",
    "pep-bounds",
)


class CliError(Exception):
    pass


# --- config handling -------------------------------------------------------


def _load_config(path: str, experiment: str) -> dict:
    """Flat string-to-string config from an INI file or a JSON sidecar."""
    try:
        text = open(path, "r", encoding="utf-8").read()
    except OSError as e:
        raise CliError(f"cannot read config {path}: {e}") from e
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise CliError(f"malformed JSON config {path}: {e}") from e
        if doc.get("experiment") != experiment:
            raise CliError(
                f"sidecar config is for experiment {doc.get('experiment')!r}, "
                f"not {experiment!r}"
            )
        return {str(k): str(v) for k, v in doc["config"].items()}
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as e:
        raise CliError(f"malformed config {path}: {e}") from e
    flat = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            flat[f"{section}.{key}"] = value
    return flat


def _get(cfg: dict, key: str, default=None) -> str:
    if key in cfg:
        return cfg[key]
    if default is None:
        raise CliError(f"missing config key {key}")
    return str(default)


def _get_int(cfg, key, default=None) -> int:
    try:
        return int(_get(cfg, key, default))
    except ValueError as e:
        raise CliError(f"config key {key} must be an integer") from e


def _get_float(cfg, key, default=None) -> float:
    try:
        return float(_get(cfg, key, default))
    except ValueError as e:
        raise CliError(f"config key {key} must be a number") from e


def _get_floats(cfg, key, default=None) -> tuple:
    raw = _get(cfg, key, default)
    try:
        return tuple(float(v) for v in raw.replace(",", " ").split())
    except ValueError as e:
        raise CliError(f"config key {key} must be a comma-separated list") from e


def _get_norms(cfg, key, default="l2,linf,ltilde") -> tuple:
    raw = _get(cfg, key, default)
    names = [v.strip().lower() for v in raw.split(",") if v.strip()]
    bad = [n for n in names if n not in _NORM_NAMES]
    if bad:
        raise CliError(f"unknown norms {bad}; valid: {sorted(_NORM_NAMES)}")
    return tuple(_NORM_NAMES[n] for n in names)


def _system(cfg: dict) -> SystemConfig:
    m = _get_int(cfg, "system.m")
    n = _get_int(cfg, "system.n")
    label = _get(cfg, "system.constellation")
    snr_db = _get_float(cfg, "system.snr_db", 15.0)
    try:
        constellation = make_constellation(label)
        return SystemConfig(M=m, N=n, sigma2=sigma2_from_snr_db(snr_db),
                            constellation=constellation)
    except ValueError as e:
        raise CliError(str(e)) from e


# --- experiment runners ----------------------------------------------------


def _fmt(v):
    if isinstance(v, (np.floating,)):
        v = float(v)
    if isinstance(v, (np.integer,)):
        v = int(v)
    if v is None:
        return ""
    return str(v)


def _exp_error_rate(cfg: dict):
    sysc = _system(cfg)
    section = "error-rate"
    grid = _get_floats(cfg, f"{section}.snr_grid_db", "10, 12.5, 15")
    norms = _get_norms(cfg, f"{section}.norms")
    trials = _get_int(cfg, f"{section}.trials", 2000)
    seed = _get_int(cfg, f"{section}.seed", 0)
    if f"{section}.eps" in cfg:
        eps, schedule = _get_float(cfg, f"{section}.eps"), None
    else:
        base = _get_float(cfg, f"{section}.restart_base", 0.1)
        runs = _get_int(cfg, f"{section}.max_runs", 12)
        eps, schedule = None, RestartSchedule.geometric(base, runs)
    plan = montecarlo.TrialPlan(
        cfg=sysc, norms=norms, trials=trials, seed=seed, eps=eps,
        schedule=schedule, snr_grid_db=grid,
    )
    res = montecarlo.run_error_rate(plan)
    cols = ["norm", "snr_db", "p_err", "ci_half_width", "n"]
    rows = [
        [_NORM_LABELS[norm], snr, est.mean, est.half_width, est.n]
        for (norm, snr), est in res.items()
    ]
    return cols, rows


def _analytic_triple(norm, report):
    if norm is NormKind.LTILDEINF:
        return None, report.total, report.total_upper
    return report.total, report.total, report.total


def _exp_complexity_vs_epsilon(cfg: dict):
    sysc = _system(cfg)
    section = "complexity-vs-epsilon"
    eps_grid = _get_floats(cfg, f"{section}.eps_grid",
                           "1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6")
    norms = _get_norms(cfg, f"{section}.norms")
    cols = ["norm", "eps", "analytic", "analytic_lo", "analytic_hi"]
    rows = []
    for norm in norms:
        for eps in eps_grid:
            rep = analytic.expected_nodes(norm, sysc, eps)
            a, lo, hi = _analytic_triple(norm, rep)
            rows.append([_NORM_LABELS[norm], eps, a, lo, hi])
    return cols, rows


def _exp_complexity_vs_level(cfg: dict):
    sysc = _system(cfg)
    section = "complexity-vs-level"
    eps = _get_float(cfg, f"{section}.eps", 1e-2)
    norms = _get_norms(cfg, f"{section}.norms")
    trials = _get_int(cfg, f"{section}.trials", 2000)
    seed = _get_int(cfg, f"{section}.seed", 0)
    plan = montecarlo.TrialPlan(cfg=sysc, norms=norms, trials=trials,
                                seed=seed, eps=eps)
    study = montecarlo.run_node_counts(plan)
    cols = ["norm", "k", "analytic", "analytic_lo", "analytic_hi",
            "empirical_mean", "ci_half_width"]
    rows = []
    for norm in norms:
        rep = analytic.expected_nodes(norm, sysc, eps)
        upper = rep.per_level_upper if rep.per_level_upper is not None else rep.per_level
        mid = rep.per_level if norm is not NormKind.LTILDEINF else None
        ests = study.per_norm[norm].per_level
        for k in range(1, sysc.M + 1):
            rows.append([
                _NORM_LABELS[norm], k,
                None if mid is None else float(mid[k - 1]),
                float(rep.per_level[k - 1]), float(upper[k - 1]),
                ests[k - 1].mean, ests[k - 1].half_width,
            ])
    return cols, rows


def _exp_complexity_vs_snr(cfg: dict):
    sysc = _system(cfg)
    section = "complexity-vs-snr"
    grid = _get_floats(cfg, f"{section}.snr_grid_db", "10, 12.5, 15")
    norms = _get_norms(cfg, f"{section}.norms")
    trials = _get_int(cfg, f"{section}.trials", 1000)
    seed = _get_int(cfg, f"{section}.seed", 0)
    base = _get_float(cfg, f"{section}.restart_base", 0.1)
    runs = _get_int(cfg, f"{section}.max_runs", 12)
    plan = montecarlo.TrialPlan(
        cfg=sysc, norms=norms, trials=trials, seed=seed,
        schedule=RestartSchedule.geometric(base, runs), snr_grid_db=grid,
    )
    res = montecarlo.run_restart_complexity(plan)
    cols = ["norm", "snr_db", "empirical_mean", "ci_half_width", "n"]
    rows = [
        [_NORM_LABELS[norm], snr, est.mean, est.half_width, est.n]
        for (norm, snr), est in res.items()
    ]
    return cols, rows


def _exp_tpb_report(cfg: dict):
    sysc = _system(cfg)
    eps = _get_float(cfg, "tpb-report.eps", 1e-2)
    rep = analytic.tree_pruning_report(sysc, eps)
    cols = ["k", "a_coefficient", "m_bar", "v_sphere", "v_box",
            "kappa_inf", "rho_c", "k_bar", "k_bar_inst"]
    rows = []
    for k in range(1, sysc.M + 1):
        rows.append([
            k, float(rep.a_values[k - 1]), rep.m_bar[k - 1],
            float(rep.v_sphere[k - 1]), float(rep.v_box[k - 1]),
            rep.kappa_inf, rep.rho_c, rep.k_bar, rep.k_bar_inst,
        ])
    return cols, rows


def _default_prefixes(sysc: SystemConfig):
    """A handful of difference prefixes covering the component classes."""
    pts = sysc.constellation.points
    diffs = np.unique(np.round((pts[:, None] - pts[None, :]).ravel(), 12))
    nz = diffs[np.abs(diffs) > 1e-9]
    real = [d for d in nz if abs(d.imag) < 1e-9]
    imag = [d for d in nz if abs(d.real) < 1e-9]
    general = [d for d in nz if abs(d.real) > 1e-9 and abs(d.imag) > 1e-9]
    r = min(real, key=abs) if real else nz[0]
    prefixes = [[r], [r, r], [0.0, r]]
    if imag:
        i = min(imag, key=abs)
        prefixes.append([i])
        prefixes.append([r, i])
    if general:
        g = min(general, key=abs)
        prefixes.append([g, r])
    return [np.asarray(p, dtype=np.complex128)[: sysc.M] for p in prefixes]


def _exp_validate_cdfs(cfg: dict):
    sysc = _system(cfg)
    samples = _get_int(cfg, "validate-cdfs.samples", 100_000)
    seed = _get_int(cfg, "validate-cdfs.seed", 0)
    rng = make_rng(seed)
    d = sysc.constellation.energy_scale  # exact-norm scale for prefix states
    cols = ["check", "n", "ks_stat", "ks_critical", "pass"]
    rows = []
    crit1 = montecarlo.ks_critical_value(samples)
    for pi, prefix in enumerate(_default_prefixes(sysc)):
        data = montecarlo.run_metric_distribution(prefix, sysc, samples, rng)
        k = prefix.size
        qs = np.rint(np.cumsum(np.abs(prefix) ** 2) * d).astype(int)
        # last-level component modulus against the binomial-mixture cdf
        state = analytic.PrefixState(
            q_prev=int(qs[k - 1] - np.rint(abs(prefix[k - 1]) ** 2 * d)),
            q_cur=int(qs[k - 1]), denominator=d,
        )
        stat = montecarlo.ks_statistic(
            data["component_abs"][:, k - 1],
            lambda t: analytic.component_cdf_linf(state, k, sysc.L, t,
                                                  sysc.sigma2, sysc.M),
        )
        rows.append([f"component_abs:prefix{pi}:level{k}", samples, stat,
                     crit1, stat < crit1])
        # full partial-metric l2 norm against the chi-type cdf
        a = qs[k - 1] / (d * sysc.M) + sysc.sigma2
        stat = montecarlo.ks_statistic(
            data["l2"],
            lambda t: analytic.reg_lower_gamma(k + sysc.L,
                                               np.asarray(t) ** 2 / a),
        )
        rows.append([f"l2_norm:prefix{pi}:k{k}", samples, stat, crit1,
                     stat < crit1])
        # independent-sum sampler against the direct channel samples
        direct_sq = data["component_abs"][:, k - 1] ** 2
        rep = analytic.sample_sum_representation(state, k, sysc.L, sysc.sigma2,
                                                 sysc.M, rng, size=samples)
        stat = montecarlo.ks_two_sample_statistic(direct_sq, rep)
        crit2 = montecarlo.ks_critical_value(samples, samples)
        rows.append([f"sum_representation:prefix{pi}:level{k}", samples, stat,
                     crit2, stat < crit2])
    return cols, rows


def _exp_pep_bounds(cfg: dict):
    sysc = _system(cfg)
    section = "pep-bounds"
    grid = _get_floats(cfg, f"{section}.snr_grid_db", "10, 20, 30, 40")
    if f"{section}.b_sq_norm" in cfg:
        b2 = _get_float(cfg, f"{section}.b_sq_norm")
    else:
        b2 = sysc.constellation.min_sq_distance()
    bounds = analytic.pairwise_error_bounds(sysc.N, sysc.M, b2)
    cols = ["snr_db", "ub_inf", "ub_ml", "lb_ml", "beta", "beta_tilde"]
    rows = []
    for snr in grid:
        rho = 1.0 / sigma2_from_snr_db(snr)
        rows.append([snr, bounds.ub_inf(rho), bounds.ub_ml(rho),
                     bounds.lb_ml(rho), bounds.beta, bounds.beta_tilde])
    return cols, rows


_RUNNERS = {
    "error-rate": _exp_error_rate,
    "complexity-vs-epsilon": _exp_complexity_vs_epsilon,
    "complexity-vs-level": _exp_complexity_vs_level,
    "complexity-vs-snr": _exp_complexity_vs_snr,
    "tpb-report": _exp_tpb_report,
    "validate-cdfs": _exp_validate_cdfs,
    "pep-bounds": _exp_pep_bounds,
}


# --- output ----------------------------------------------------------------


def _render_csv(cols, rows) -> str:
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _render_json(cols, rows) -> str:
    doc = [dict(zip(cols, [None if v is None else v for v in row])) for row in rows]

    def clean(v):
        if isinstance(v, (np.floating,)):
            return float(v)
        if isinstance(v, (np.integer,)):
            return int(v)
        if isinstance(v, (np.bool_,)):
            return bool(v)
        return v

    doc = [{k: clean(v) for k, v in row.items()} for row in doc]
    return json.dumps(doc, indent=2) + "\n"


def _atomic_write(path: str, content: str) -> None:
    tmp = f"{path}.tmp{os.getpid()}"
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(experiment: str, config_path: str, overrides: dict | None = None,
        out: str | None = None, fmt: str = "csv") -> str:
    """Programmatic entry point; returns the report path."""
    if experiment not in _RUNNERS:
        raise CliError(f"unknown experiment {experiment!r}; valid: {EXPERIMENTS}")
    if fmt not in ("csv", "json"):
        raise CliError("format must be csv or json")
    cfg = _load_config(config_path, experiment)
    for key, value in (overrides or {}).items():
        if value is not None:
            cfg[f"{experiment}.{key}"] = str(value)
    started = time.monotonic()
    cols, rows = _RUNNERS[experiment](cfg)
    wall = time.monotonic() - started
    out = out or f"{experiment}.{fmt}"
    report = _render_csv(cols, rows) if fmt == "csv" else _render_json(cols, rows)
    sidecar = json.dumps(
        {
            "experiment": experiment,
            "config": cfg,
            "seed": cfg.get(f"{experiment}.seed", "0"),
            "version": _VERSION,
            "wall_time_s": round(wall, 3),
            "out": out,
            "format": fmt,
        },
        indent=2,
    ) + "\n"
    _atomic_write(out, report)
    _atomic_write(out + ".meta.json", sidecar)
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="spherelab",
        description="Sphere-decoding workbench: analytic complexity engine "
        "and Monte Carlo experiments.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
    args = parser.parse_args(argv)
    try:
        out = run(
            args.experiment,
            args.config,
            overrides={"seed": args.seed, "trials": args.trials},
            out=args.out,
            fmt=args.format,
        )
    except CliError as e:
        print(f"spherelab: error: {e}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
