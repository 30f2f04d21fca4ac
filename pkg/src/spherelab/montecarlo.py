"""Seeded Monte Carlo trial runner and empirical-distribution validators.

Trials are independent work items reduced by summation.  Realizations are
generated in fixed-size blocks; the random stream of a block is keyed by
``(seed, grid point, block index)``, so results are bit-identical for a
given plan regardless of how blocks are scheduled across workers.  Within
a trial all requested norms decode the same (channel, noise, data)
realization, which pairs the comparisons and lets the realization-wise
pruning guarantee be checked inline.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import analytic
from .decoder import NormKind, RestartSchedule, batch_decode
from .model import (
    SystemConfig,
    child_rng,
    qr_reduce,
    realize_batch,
    sigma2_from_snr_db,
)

__all__ = [
    "TrialPlan",
    "EstimateWithCI",
    "LevelEstimates",
    "NodeCountStudy",
    "run_error_rate",
    "run_node_counts",
    "run_restart_complexity",
    "run_metric_distribution",
    "ks_statistic",
    "ks_two_sample_statistic",
    "ks_critical_value",
]

_Z95 = 1.959963984540054  # two-sided 95% normal quantile
_ENV_WORKERS = "SPHERELAB_THREADS"


@dataclass(frozen=True)
class EstimateWithCI:
    """Sample mean with a 95% normal-approximation half width."""

    mean: float
    half_width: float
    n: int


@dataclass(frozen=True)
class LevelEstimates:
    per_level: tuple  # EstimateWithCI per tree level
    total: EstimateWithCI


@dataclass(frozen=True)
class NodeCountStudy:
    per_norm: dict
    pruning_violations: int | None  # box-vs-sphere realization-wise check
    pruning_depth: int | None


@dataclass(frozen=True)
class TrialPlan:
    """What to simulate: system, norms, radius policy, grid, trials, seed.

    Exactly one of ``eps`` (fixed radius) and ``schedule`` (restarting)
    must be set.  ``snr_grid_db`` of None means a single grid point at the
    config's own noise level.  ``block_size`` fixes the granularity of the
    random streams and therefore participates in reproducibility.
    """

    cfg: SystemConfig
    norms: tuple
    trials: int
    seed: int
    eps: float | None = None
    schedule: RestartSchedule | None = None
    snr_grid_db: tuple | None = None
    block_size: int = 1024
    n_workers: int | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if (self.eps is None) == (self.schedule is None):
            raise ValueError("specify exactly one of eps and schedule")
        if not self.norms:
            raise ValueError("at least one norm is required")
        if self.snr_grid_db is not None and len(self.snr_grid_db) == 0:
            raise ValueError("snr grid must be nonempty")
        if self.block_size < 1:
            raise ValueError("block_size must be >= 1")


def _workers(plan: TrialPlan) -> int:
    if plan.n_workers is not None:
        return max(1, plan.n_workers)
    return max(1, int(os.environ.get(_ENV_WORKERS, "1")))


def _grid_configs(plan: TrialPlan):
    if plan.snr_grid_db is None:
        return [(plan.cfg.snr_db, plan.cfg)]
    return [
        (float(s), replace_sigma(plan.cfg, sigma2_from_snr_db(s)))
        for s in plan.snr_grid_db
    ]


def replace_sigma(cfg: SystemConfig, sigma2: float) -> SystemConfig:
    return SystemConfig(M=cfg.M, N=cfg.N, sigma2=sigma2,
                        constellation=cfg.constellation)


def _decode_policy(R, y, cfg, norm, eps, schedule):
    """Fixed-radius or restarted batch decode.

    Returns (counts, found, decision_index, runs_used); counts accumulate
    the work of failed runs under a schedule.
    """
    pts = cfg.constellation.points
    T = R.shape[0]
    if eps is not None:
        C = _radius_for(norm, eps, cfg.N, cfg.sigma2)
        res = batch_decode(R, y, pts, norm, C)
        return res.counts, res.found, res.decision_index, np.ones(T, dtype=np.int64)
    counts = np.zeros((T, cfg.M), dtype=np.int64)
    found = np.zeros(T, dtype=bool)
    decision = np.zeros((T, cfg.M), dtype=np.int16)
    runs = np.zeros(T, dtype=np.int64)
    remaining = np.arange(T)
    for eps_i in schedule.run_eps:
        C = _radius_for(norm, eps_i, cfg.N, cfg.sigma2)
        res = batch_decode(R[remaining], y[remaining], pts, norm, C)
        counts[remaining] += res.counts
        runs[remaining] += 1
        hit = res.found
        idx_hit = remaining[hit]
        found[idx_hit] = True
        decision[idx_hit] = res.decision_index[hit]
        remaining = remaining[~hit]
        if remaining.size == 0:
            break
    return counts, found, decision, runs


def _radius_for(norm: NormKind, eps: float, N: int, sigma2: float) -> float:
    if norm is NormKind.L2:
        return math.sqrt(analytic.radius_l2(eps, N, sigma2))
    if norm is NormKind.LINF:
        return math.sqrt(analytic.radius_linf(eps, N, sigma2))
    return math.sqrt(analytic.radius_ltilde(eps, N, sigma2))


# --- block workers (top level so process pools can pickle them) -----------


def _error_rate_block(args):
    cfg, norms, eps, schedule, seed, gi, block, count = args
    rng = child_rng(seed, gi, block)
    R, y, d_idx = realize_batch(cfg, rng, count)
    out = {}
    for norm in norms:
        _counts, found, dec, _runs = _decode_policy(R, y, cfg, norm, eps, schedule)
        wrong = ~found | np.any(dec != d_idx, axis=1)
        out[norm] = int(wrong.sum())
    return out


def _node_count_block(args):
    cfg, norms, eps, seed, gi, block, count, k_inst = args
    rng = child_rng(seed, gi, block)
    R, y, _d_idx = realize_batch(cfg, rng, count)
    sums, sumsq, totals, total_sq = {}, {}, {}, {}
    per_norm_counts = {}
    for norm in norms:
        counts, _found, _dec, _runs = _decode_policy(R, y, cfg, norm, eps, None)
        per_norm_counts[norm] = counts
        c = counts.astype(np.float64)
        sums[norm] = c.sum(axis=0)
        sumsq[norm] = (c * c).sum(axis=0)
        t = c.sum(axis=1)
        totals[norm] = float(t.sum())
        total_sq[norm] = float((t * t).sum())
    violations = 0
    if k_inst and NormKind.L2 in per_norm_counts and NormKind.LINF in per_norm_counts:
        a = per_norm_counts[NormKind.LINF][:, :k_inst]
        b = per_norm_counts[NormKind.L2][:, :k_inst]
        violations = int((a > b).sum())
    return sums, sumsq, totals, total_sq, violations


def _restart_block(args):
    cfg, norms, schedule, seed, gi, block, count = args
    rng = child_rng(seed, gi, block)
    R, y, _d_idx = realize_batch(cfg, rng, count)
    out = {}
    for norm in norms:
        counts, _found, _dec, _runs = _decode_policy(R, y, cfg, norm, None, schedule)
        t = counts.sum(axis=1).astype(np.float64)
        out[norm] = (float(t.sum()), float((t * t).sum()))
    return out


def _blocks(trials: int, block_size: int):
    for b, lo in enumerate(range(0, trials, block_size)):
        yield b, min(block_size, trials - lo)


def _map_blocks(fn, jobs, workers: int):
    if workers <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs, chunksize=1))


def _mean_ci(total: float, total_sq: float, n: int) -> EstimateWithCI:
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    half = _Z95 * math.sqrt(var / n)
    return EstimateWithCI(mean=mean, half_width=half, n=n)


def _proportion_ci(successes: int, n: int) -> EstimateWithCI:
    p = successes / n
    half = _Z95 * math.sqrt(max(p * (1.0 - p), 0.0) / n)
    return EstimateWithCI(mean=p, half_width=half, n=n)


# --- public runners --------------------------------------------------------


def run_error_rate(plan: TrialPlan) -> dict:
    """Vector error probability per (norm, SNR grid point).

    A trial errs when the decoded vector differs from the transmitted one
    or, under a fixed radius, when no leaf lies inside the search region.
    """
    results = {}
    workers = _workers(plan)
    for gi, (snr_db, cfg) in enumerate(_grid_configs(plan)):
        jobs = [
            (cfg, plan.norms, plan.eps, plan.schedule, plan.seed, gi, b, c)
            for b, c in _blocks(plan.trials, plan.block_size)
        ]
        partials = _map_blocks(_error_rate_block, jobs, workers)
        for norm in plan.norms:
            errs = sum(p[norm] for p in partials)
            results[(norm, snr_db)] = _proportion_ci(errs, plan.trials)
    return results


def run_node_counts(plan: TrialPlan) -> NodeCountStudy:
    """Empirical mean visited nodes per level at one fixed eps radius.

    When both the sphere and box decoders run, every shared realization is
    checked for the guarantee that the box prunes at least as hard up to
    the radii-ratio depth; the violation count is reported (it must be 0).
    """
    if plan.eps is None:
        raise ValueError("run_node_counts needs a fixed eps radius")
    if plan.snr_grid_db is not None and len(plan.snr_grid_db) != 1:
        raise ValueError("run_node_counts uses a single noise level")
    cfg = (
        plan.cfg
        if plan.snr_grid_db is None
        else replace_sigma(plan.cfg, sigma2_from_snr_db(plan.snr_grid_db[0]))
    )
    k_inst = None
    if NormKind.L2 in plan.norms and NormKind.LINF in plan.norms:
        rho_c = analytic.radii_ratio(cfg.N, plan.eps)
        k_inst = min(max(math.floor(rho_c) - cfg.L, 0), cfg.M)
    jobs = [
        (cfg, plan.norms, plan.eps, plan.seed, 0, b, c, k_inst or 0)
        for b, c in _blocks(plan.trials, plan.block_size)
    ]
    partials = _map_blocks(_node_count_block, jobs, _workers(plan))
    per_norm = {}
    for norm in plan.norms:
        s = sum(p[0][norm] for p in partials)
        ss = sum(p[1][norm] for p in partials)
        levels = tuple(
            _mean_ci(float(s[k]), float(ss[k]), plan.trials) for k in range(cfg.M)
        )
        tot = sum(p[2][norm] for p in partials)
        tot_sq = sum(p[3][norm] for p in partials)
        per_norm[norm] = LevelEstimates(
            per_level=levels, total=_mean_ci(tot, tot_sq, plan.trials)
        )
    violations = sum(p[4] for p in partials) if k_inst is not None else None
    return NodeCountStudy(per_norm=per_norm, pruning_violations=violations,
                          pruning_depth=k_inst)


def run_restart_complexity(plan: TrialPlan) -> dict:
    """Mean total node count accumulated across restart runs, per
    (norm, SNR grid point)."""
    if plan.schedule is None:
        raise ValueError("run_restart_complexity needs a restart schedule")
    results = {}
    workers = _workers(plan)
    for gi, (snr_db, cfg) in enumerate(_grid_configs(plan)):
        jobs = [
            (cfg, plan.norms, plan.schedule, plan.seed, gi, b, c)
            for b, c in _blocks(plan.trials, plan.block_size)
        ]
        partials = _map_blocks(_restart_block, jobs, workers)
        for norm in plan.norms:
            tot = sum(p[norm][0] for p in partials)
            tot_sq = sum(p[norm][1] for p in partials)
            results[(norm, snr_db)] = _mean_ci(tot, tot_sq, plan.trials)
    return results


# --- empirical metric distributions ---------------------------------------


def run_metric_distribution(b_prefix, cfg: SystemConfig, samples: int,
                            rng: np.random.Generator) -> dict:
    """Sample the partial residual of a fixed difference prefix.

    ``b_prefix[m-1]`` is the difference component introduced at tree level
    ``m`` (every entry must be a pairwise difference of constellation
    symbols).  Fresh channels are reduced by QR per sample; returns arrays

    - ``component_abs``: |component| per level, shape (samples, k)
    - ``component_tilde``: max(|Re|, |Im|) per level
    - ``l2``, ``linf``, ``ltilde``: the three partial-metric norms of the
      full prefix residual including the static noise tail.
    """
    b_prefix = np.asarray(b_prefix, dtype=np.complex128)
    kmax = b_prefix.size
    if not 1 <= kmax <= cfg.M:
        raise ValueError("prefix length must lie in [1, M]")
    pts = cfg.constellation.points
    diffs = (pts[:, None] - pts[None, :]).ravel()
    for v in b_prefix:
        if np.abs(diffs - v).min() > 1e-9:
            raise ValueError(f"{v} is not a pairwise symbol difference")

    M, N = cfg.M, cfg.N
    b_full = np.zeros(M, dtype=np.complex128)
    for m in range(1, kmax + 1):
        b_full[M - m] = b_prefix[m - 1]

    comp = np.empty((samples, kmax), dtype=np.complex128)
    tail_sq = np.empty(samples)
    tail_inf = np.empty(samples)
    tail_tilde = np.empty(samples)
    done = 0
    block = 4096
    while done < samples:
        c = min(block, samples - done)
        std = math.sqrt(1.0 / (2.0 * M))
        H = std * (rng.standard_normal((c, N, M))
                   + 1j * rng.standard_normal((c, N, M)))
        nstd = math.sqrt(cfg.sigma2 / 2.0)
        n = nstd * (rng.standard_normal((c, N)) + 1j * rng.standard_normal((c, N)))
        _Q, R = qr_reduce(H)
        z = np.einsum("tij,j->ti", R, b_full) + n[:, :M]
        for m in range(1, kmax + 1):
            comp[done : done + c, m - 1] = z[:, M - m]
        tail = n[:, M:]
        tail_sq[done : done + c] = (np.abs(tail) ** 2).sum(axis=1) if N > M else 0.0
        tail_inf[done : done + c] = (
            np.abs(tail).max(axis=1) if N > M else 0.0
        )
        tail_tilde[done : done + c] = (
            np.maximum(np.abs(tail.real), np.abs(tail.imag)).max(axis=1)
            if N > M
            else 0.0
        )
        done += c

    comp_abs = np.abs(comp)
    comp_tilde = np.maximum(np.abs(comp.real), np.abs(comp.imag))
    l2 = np.sqrt((comp_abs**2).sum(axis=1) + tail_sq)
    linf = np.maximum(comp_abs.max(axis=1), tail_inf)
    ltilde = np.maximum(comp_tilde.max(axis=1), tail_tilde)
    return {
        "component_abs": comp_abs,
        "component_tilde": comp_tilde,
        "l2": l2,
        "linf": linf,
        "ltilde": ltilde,
    }


# --- Kolmogorov-Smirnov helpers -------------------------------------------


def ks_statistic(samples, cdf) -> float:
    """Sup distance between the empirical cdf and a callable model cdf."""
    x = np.sort(np.asarray(samples, dtype=np.float64))
    n = x.size
    f = np.asarray(cdf(x), dtype=np.float64)
    up = np.arange(1, n + 1) / n - f
    down = f - np.arange(0, n) / n
    return float(max(up.max(), down.max()))


def ks_two_sample_statistic(a, b) -> float:
    """Sup distance between two empirical cdfs."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    both = np.concatenate([a, b])
    fa = np.searchsorted(a, both, side="right") / a.size
    fb = np.searchsorted(b, both, side="right") / b.size
    return float(np.abs(fa - fb).max())


def ks_critical_value(n: int, m: int | None = None, alpha: float = 0.01) -> float:
    """Asymptotic KS critical value at level ``alpha`` (two-sample when
    ``m`` is given)."""
    c = math.sqrt(-0.5 * math.log(alpha / 2.0))
    if m is None:
        return c / math.sqrt(n)
    return c * math.sqrt((n + m) / (n * m))
