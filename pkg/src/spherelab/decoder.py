"""Tree-search sphere decoders under three pruning metrics.

The search enumerates, level by level, exactly the symbol prefixes whose
partial metric satisfies the pruning constraint.  All three metrics are
nondecreasing along root-to-leaf paths, so the per-level counters equal
the number of constraint-satisfying nodes regardless of traversal order;
the level-synchronous (rather than literally depth-first) expansion used
here is chosen because it vectorizes across surviving prefixes and across
independent problem instances.

Level ``k`` fixes symbol position ``M - k`` (leaves fix position 0).  The
static bottom ``L = N - M`` entries of ``y`` enter every partial metric and
seed the root metric.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import analytic as _analytic
from .model import DecodeProblem

__all__ = [
    "NormKind",
    "RadiusSpec",
    "RestartSchedule",
    "DecodeOutcome",
    "partial_metric_update",
    "decode_fixed",
    "decode_restart",
    "exhaustive_decode",
    "batch_decode",
    "BatchDecodeResult",
]

_EXHAUSTIVE_GUARD = 10**6


class NormKind(enum.Enum):
    """Pruning metric: squared Euclidean, componentwise modulus, or
    componentwise max of |real| and |imag| (squaring-free)."""

    L2 = "l2"
    LINF = "linf"
    LTILDEINF = "ltilde"


def partial_metric_update(norm: NormKind, parent_metric: float, residual: complex) -> float:
    """One-level metric recursion.

    L2 accumulates squared magnitudes (the L2 metric is tracked in squared
    form); LINF takes the running max of component moduli; LTILDEINF the
    running max over real and imaginary parts.
    """
    if parent_metric < 0:
        raise ValueError("parent metric must be nonnegative")
    z = complex(residual)
    if norm is NormKind.L2:
        return parent_metric + z.real * z.real + z.imag * z.imag
    if norm is NormKind.LINF:
        return max(parent_metric, abs(z))
    if norm is NormKind.LTILDEINF:
        return max(parent_metric, abs(z.real), abs(z.imag))
    raise ValueError(f"unknown norm {norm!r}")


@dataclass(frozen=True)
class RadiusSpec:
    """Search radius, either explicit or derived from a containment
    probability ``1 - eps`` for the transmitted vector."""

    radius: float | None = None
    eps: float | None = None

    def __post_init__(self):
        if (self.radius is None) == (self.eps is None):
            raise ValueError("specify exactly one of radius and eps")
        if self.radius is not None and not self.radius > 0:
            raise ValueError("radius must be positive")
        if self.eps is not None and not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")

    @classmethod
    def explicit(cls, radius: float) -> "RadiusSpec":
        return cls(radius=float(radius))

    @classmethod
    def from_epsilon(cls, eps: float) -> "RadiusSpec":
        return cls(eps=float(eps))

    def resolve(self, norm: NormKind, N: int, sigma2: float) -> float:
        """Linear radius for the given norm."""
        if self.radius is not None:
            return self.radius
        if norm is NormKind.L2:
            csq = _analytic.radius_l2(self.eps, N, sigma2)
        elif norm is NormKind.LINF:
            csq = _analytic.radius_linf(self.eps, N, sigma2)
        else:
            csq = _analytic.radius_ltilde(self.eps, N, sigma2)
        return math.sqrt(csq)


@dataclass(frozen=True)
class RestartSchedule:
    """Strictly decreasing eps values, one per run; the radius grows until
    a leaf is found or the schedule is exhausted."""

    eps_sequence: tuple
    max_runs: int

    def __post_init__(self):
        seq = tuple(float(e) for e in self.eps_sequence)
        if not seq:
            raise ValueError("eps_sequence must be nonempty")
        if any(not 0.0 < e < 1.0 for e in seq):
            raise ValueError("every eps must lie in (0, 1)")
        if any(b >= a for a, b in zip(seq, seq[1:])):
            raise ValueError("eps_sequence must be strictly decreasing")
        if self.max_runs < 1:
            raise ValueError("max_runs must be positive")
        object.__setattr__(self, "eps_sequence", seq)

    @classmethod
    def geometric(cls, base: float = 0.1, max_runs: int = 12) -> "RestartSchedule":
        """``eps = base**i`` for run ``i = 1..max_runs``."""
        return cls(eps_sequence=tuple(base**i for i in range(1, max_runs + 1)),
                   max_runs=max_runs)

    @property
    def run_eps(self) -> tuple:
        return self.eps_sequence[: self.max_runs]


@dataclass(frozen=True, eq=False)
class DecodeOutcome:
    """Decoder result for one problem.

    ``nodes_per_level[k-1]`` is the exact number of level-``k`` prefixes
    satisfying the pruning constraint (accumulated across runs under a
    restart schedule; ``nodes_per_run`` keeps the per-run split).  ``metric``
    is the decision's metric under the active norm (the plain L2 norm, not
    its square, for L2).
    """

    decision: np.ndarray | None
    decision_index: np.ndarray | None
    metric: float
    nodes_per_level: np.ndarray
    runs_used: int
    found_leaf: bool
    nodes_per_run: tuple = field(default=())


@dataclass(frozen=True, eq=False)
class BatchDecodeResult:
    counts: np.ndarray  # (T, M) constraint-satisfying nodes per level
    found: np.ndarray  # (T,) leaf found inside the region
    decision_index: np.ndarray  # (T, M) symbol indices, position order
    metric: np.ndarray  # (T,) metric of the decision (inf if none)


def batch_decode(R, y, points, norm: NormKind, radius) -> BatchDecodeResult:
    """Constrained enumeration over a stack of problems.

    ``R``: (T, M, M) upper triangular, ``y``: (T, N), ``points``: the
    constellation, ``radius``: scalar or per-problem linear radius.  The
    decision is the constraint-satisfying leaf of minimum metric; among
    equal-metric leaves the one whose level-order symbol-index tuple is
    lexicographically smallest wins (children are expanded in constellation
    index order, which makes that the first minimum encountered).
    """
    R = np.asarray(R)
    y = np.asarray(y)
    pts = np.asarray(points)
    T, M = R.shape[0], R.shape[1]
    N = y.shape[1]
    A = pts.size
    radius = np.broadcast_to(np.asarray(radius, dtype=np.float64), (T,))

    squared = norm is NormKind.L2
    bound = radius * radius if squared else radius

    tail = y[:, M:]
    if squared:
        root = np.abs(tail) ** 2 @ np.ones(N - M) if N > M else np.zeros(T)
    elif norm is NormKind.LINF:
        root = np.abs(tail).max(axis=1) if N > M else np.zeros(T)
    else:
        root = (
            np.maximum(np.abs(tail.real), np.abs(tail.imag)).max(axis=1)
            if N > M
            else np.zeros(T)
        )

    counts = np.zeros((T, M), dtype=np.int64)
    tid = np.flatnonzero(root <= bound)
    metric = root[tid]
    vals = np.zeros((tid.size, 0), dtype=np.complex128)  # positions M-k+1..M-1
    idxs = np.zeros((tid.size, 0), dtype=np.int16)  # level order 1..k

    for k in range(1, M + 1):
        if tid.size == 0:
            break
        r = M - k
        rows = R[tid, r, :]  # (n, M)
        rhs = y[tid, r]
        if k > 1:
            rhs = rhs - np.einsum("ij,ij->i", rows[:, r + 1 :], vals)
        z = rhs[:, None] - rows[:, r, None] * pts[None, :]
        if squared:
            new_metric = metric[:, None] + (z.real * z.real + z.imag * z.imag)
        elif norm is NormKind.LINF:
            new_metric = np.maximum(metric[:, None], np.abs(z))
        else:
            new_metric = np.maximum(
                metric[:, None], np.maximum(np.abs(z.real), np.abs(z.imag))
            )
        ok = new_metric <= bound[tid][:, None]
        np.add.at(counts[:, k - 1], tid, ok.sum(axis=1))
        rowi, symi = np.nonzero(ok)  # row-major: preserves (tid, lex) order
        tid = tid[rowi]
        metric = new_metric[rowi, symi]
        vals = np.concatenate([pts[symi][:, None], vals[rowi]], axis=1)
        idxs = np.concatenate([idxs[rowi], symi[:, None].astype(np.int16)], axis=1)

    found = np.zeros(T, dtype=bool)
    best_idx = np.zeros((T, M), dtype=np.int16)
    best_metric = np.full(T, np.inf)
    if tid.size:
        # rows remain grouped by trial in lexicographic order; pick the
        # first row attaining each trial's minimum metric
        seg_start = np.flatnonzero(np.r_[True, np.diff(tid) > 0])
        seg_id = np.cumsum(np.r_[True, np.diff(tid) > 0]) - 1
        mins = np.minimum.reduceat(metric, seg_start)
        cand = np.flatnonzero(metric == mins[seg_id])
        first = cand[np.r_[True, np.diff(tid[cand]) > 0]]
        sel = tid[first]
        found[sel] = True
        best_idx[sel] = idxs[first][:, ::-1]  # level order -> position order
        best_metric[sel] = np.sqrt(metric[first]) if squared else metric[first]
    return BatchDecodeResult(
        counts=counts, found=found, decision_index=best_idx, metric=best_metric
    )


def _outcome_from_batch(problem: DecodeProblem, res: BatchDecodeResult,
                        runs_used: int, per_run=()) -> DecodeOutcome:
    found = bool(res.found[0])
    idx = res.decision_index[0].astype(np.int64) if found else None
    return DecodeOutcome(
        decision=problem.constellation.points[idx] if found else None,
        decision_index=idx,
        metric=float(res.metric[0]),
        nodes_per_level=res.counts[0].copy(),
        runs_used=runs_used,
        found_leaf=found,
        nodes_per_run=tuple(per_run),
    )


def decode_fixed(problem: DecodeProblem, norm: NormKind, radius: RadiusSpec) -> DecodeOutcome:
    """Single fixed-radius search.  An empty search region is a valid
    outcome (``found_leaf`` False); the radius is never adapted in-run."""
    C = radius.resolve(norm, problem.N, problem.sigma2)
    res = batch_decode(
        problem.R[None], problem.y[None], problem.constellation.points, norm, C
    )
    return _outcome_from_batch(problem, res, runs_used=1,
                               per_run=(res.counts[0].copy(),))


def decode_restart(problem: DecodeProblem, norm: NormKind,
                   schedule: RestartSchedule) -> DecodeOutcome:
    """Rerun with growing radii until a leaf is found.

    Whenever a run contains any leaf it also contains the minimum-metric
    leaf, so the first successful run returns the exact minimum-norm
    decision.  ``nodes_per_level`` accumulates the work of failed runs.
    """
    total = np.zeros(problem.M, dtype=np.int64)
    per_run = []
    for i, eps in enumerate(schedule.run_eps, start=1):
        out = decode_fixed(problem, norm, RadiusSpec.from_epsilon(eps))
        total += out.nodes_per_level
        per_run.append(out.nodes_per_level)
        if out.found_leaf:
            return DecodeOutcome(
                decision=out.decision,
                decision_index=out.decision_index,
                metric=out.metric,
                nodes_per_level=total,
                runs_used=i,
                found_leaf=True,
                nodes_per_run=tuple(per_run),
            )
    return DecodeOutcome(
        decision=None,
        decision_index=None,
        metric=math.inf,
        nodes_per_level=total,
        runs_used=len(per_run),
        found_leaf=False,
        nodes_per_run=tuple(per_run),
    )


def _full_metric(z: np.ndarray, norm: NormKind) -> np.ndarray:
    if norm is NormKind.L2:
        return np.sqrt((np.abs(z) ** 2).sum(axis=0))
    if norm is NormKind.LINF:
        return np.abs(z).max(axis=0)
    return np.maximum(np.abs(z.real), np.abs(z.imag)).max(axis=0)


def exhaustive_decode(problem: DecodeProblem, norm: NormKind) -> np.ndarray:
    """Brute-force minimum-metric vector over the whole alphabet.

    Enumerates candidates in the tree's lexicographic level order so that
    ties resolve identically to the tree search.  Guarded to alphabets of
    at most 10^6 candidates.
    """
    A = problem.constellation.size
    M = problem.M
    total = A**M
    if total > _EXHAUSTIVE_GUARD:
        raise ValueError(f"exhaustive search over {total} candidates refused")
    pts = problem.constellation.points
    # candidate c: level-order digits of c in base A (level 1 most significant)
    cand = np.arange(total)
    digits = np.empty((M, total), dtype=np.int64)
    rem = cand
    for lvl in range(M, 0, -1):  # least significant digit is level M
        digits[lvl - 1] = rem % A
        rem = rem // A
    # level j fixes position M - j
    pos_index = digits[::-1]  # row p = position p symbol index
    D = pts[pos_index]  # (M, total)
    stacked = np.zeros((problem.N, total), dtype=np.complex128)
    stacked[:M] = problem.R @ D
    z = problem.y[:, None] - stacked
    metrics = _full_metric(z, norm)
    best = int(np.argmin(metrics))  # first minimum = lexicographically smallest
    return pts[pos_index[:, best]]
