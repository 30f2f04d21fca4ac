"""Closed-form complexity and error-probability expressions.

The expected per-level node counts of the tree-search decoders are sums
over all ordered pairs of transmitted / hypothesized symbol prefixes.
Every summand depends on the pairwise difference prefix only through its
accumulated exact squared norm (and, for the squaring-free metric, the
current component's class), so the sums are evaluated by dynamic
programming over the integer-scaled accumulated norm: the state after
``m`` levels is the exact value of ``denominator * ||b_m||^2`` and carries
the total probability-weighted product of per-level factors.  This
reduces the cost from exponential in the number of prefix pairs to
polynomial in (levels) x (distinct accumulated norms).

Notation used throughout: ``M``/``N`` transmit/receive antennas,
``L = N - M``, ``sigma2`` the per-component noise variance, level ``m``
adds one difference component, ``q_prev``/``q_cur`` the integer-scaled
squared prefix norms before and after that component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sc

from .model import (
    CLASS_GENERAL,
    CLASS_IMAG,
    CLASS_REAL,
    CLASS_ZERO,
    DifferenceProfile,
    SystemConfig,
    difference_profile,
)
from .special import (
    _log_binomial_weight,
    _log_negative_binomial_weight,
    inv_reg_lower_gamma,
    reg_lower_gamma,
)

__all__ = [
    "PrefixState",
    "ComplexityReport",
    "TreePruningReport",
    "PairwiseErrorBounds",
    "radius_l2",
    "radius_linf",
    "radius_ltilde",
    "component_cdf_linf",
    "component_cdf_ltilde_exact",
    "component_cdf_ltilde_bounds",
    "component_metric_mgf",
    "sample_sum_representation",
    "expected_nodes",
    "complexity_lower_bound",
    "scaling_exponent",
    "scaling_term_log",
    "high_snr_visit_coefficient",
    "radii_ratio",
    "tree_pruning_report",
    "asymptotic_visit_probability",
    "pairwise_error_bounds",
]

_SERIES_MASS_TOL = 1e-12  # stop once this little negative-binomial mass remains
_SERIES_VALUE_TOL = 1e-16  # ... or once the remaining gamma factors are this small


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    return eps


def _kappa_inf_from_log1m(N: int, log1m_eps: float) -> float:
    """``-log(1 - (1-eps)^(1/N))`` from ``log(1-eps)``, stable at both ends."""
    v = log1m_eps / N
    if v > -math.log(2.0):  # (1-eps)^(1/N) > 1/2: eps-small regime
        return -math.log(-math.expm1(v))
    return -math.log1p(-math.exp(v))


def radius_l2(eps: float, N: int, sigma2: float) -> float:
    """Squared sphere radius containing the noise with probability 1-eps:
    ``sigma2 * Pinv(N, 1-eps)``."""
    eps = _check_eps(eps)
    return sigma2 * inv_reg_lower_gamma(N, 1.0 - eps)


def radius_linf(eps: float, N: int, sigma2: float) -> float:
    """Squared box radius with the same containment probability:
    ``-sigma2 * log(1 - (1-eps)^(1/N))``."""
    eps = _check_eps(eps)
    return sigma2 * _kappa_inf_from_log1m(N, math.log1p(-eps))


def radius_ltilde(eps: float, N: int, sigma2: float) -> float:
    """Squared radius of the squaring-free box:
    ``sigma2 * Pinv(1/2, (1-eps)^(1/(2N)))``."""
    eps = _check_eps(eps)
    y = math.exp(math.log1p(-eps) / (2 * N))
    return sigma2 * inv_reg_lower_gamma(0.5, y)


# ---------------------------------------------------------------------------
# per-component partial-metric cdfs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrefixState:
    """Exact integer-scaled squared prefix norms before/after one level."""

    q_prev: int
    q_cur: int
    denominator: int

    def __post_init__(self):
        if self.denominator < 1:
            raise ValueError("denominator must be a positive integer")
        if not 0 <= self.q_prev <= self.q_cur:
            raise ValueError("need 0 <= q_prev <= q_cur")


def _linf_mixture(p, x, m, L):
    """``sum_l B_l(p) P(m+L-l, x)`` for paired arrays ``p`` and ``x``."""
    shape = np.shape(x)
    p = np.atleast_1d(np.asarray(p, dtype=np.float64))
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    n = m + L - 1
    l = np.arange(n + 1)
    logB = _log_binomial_weight(n, l[None, :], p[..., None])
    G = _sc.gammainc((m + L - l)[None, :], x[..., None])
    return (np.exp(logB) * G).sum(axis=-1).reshape(shape)


def _linf_factor_vec(q_prev, q_cur, m, L, Csq, sigma2, M, denom):
    """P[|component| <= C] for arrays of prefix states (fixed level m).

    Binomial mixture of chi cdfs with
    ``p = (q_prev + d M sigma2)/(q_cur + d M sigma2)`` and
    ``x = Csq / (q_cur/(d M) + sigma2)``.
    """
    q_prev = np.asarray(q_prev, dtype=np.float64)
    q_cur = np.asarray(q_cur, dtype=np.float64)
    shift = denom * M * sigma2
    p = (q_prev + shift) / (q_cur + shift)
    x = Csq / (q_cur / (denom * M) + sigma2)
    return _linf_mixture(p, x, m, L)


def component_cdf_linf(state: PrefixState, m: int, L: int, C,
                       sigma2: float, M: int):
    """cdf of one complex component of the partial residual at radius C.

    Vectorized over ``C``.
    """
    if m < 1:
        raise ValueError("level index m must be >= 1")
    C = np.asarray(C, dtype=np.float64)
    d = state.denominator
    shift = d * M * sigma2
    p = (state.q_prev + shift) / (state.q_cur + shift)
    x = C * C / (state.q_cur / (d * M) + sigma2)
    out = _linf_mixture(np.broadcast_to(p, x.shape), x, m, L)
    return out if out.ndim else float(out)


def _ltilde_series(p, x, r, upper_tail_allowance=False):
    """``P(1/2, x) * sum_s D_s(p) P(s + 1/2, x)`` for paired arrays.

    The series is truncated once the remaining negative-binomial mass is
    below _SERIES_MASS_TOL or the remaining gamma factors fall below
    _SERIES_VALUE_TOL (they decrease in ``s``).  With
    ``upper_tail_allowance`` the truncated tail is replaced by its rigorous
    upper bound so the result never underestimates.
    """
    shape = np.shape(x)
    p = np.atleast_1d(np.asarray(p, dtype=np.float64))
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    total = np.zeros_like(x)
    mass = np.zeros_like(x)
    last_gamma = np.ones_like(x)
    s0 = 0
    chunk = 64
    while True:
        s = np.arange(s0, s0 + chunk)
        logD = _log_negative_binomial_weight(r, s[None, :], p[..., None])
        D = np.exp(logD)
        G = _sc.gammainc(s[None, :] + 0.5, x[..., None])
        total += (D * G).sum(axis=-1)
        mass += D.sum(axis=-1)
        last_gamma = G[..., -1]
        rest = np.clip(1.0 - mass, 0.0, None)
        if np.all((rest < _SERIES_MASS_TOL) | (rest * last_gamma < _SERIES_VALUE_TOL)):
            break
        s0 += chunk
        chunk = min(2 * chunk, 8192)
        if s0 > 10**7:
            raise RuntimeError("series for the squaring-free component cdf "
                               "did not converge")
    if upper_tail_allowance:
        total = total + np.clip(1.0 - mass, 0.0, None) * last_gamma
    return (_sc.gammainc(0.5, x) * np.minimum(total, 1.0)).reshape(shape)


def _ltilde_exact_factor_vec(q_prev, q_cur, m, L, Csq, sigma2, M, denom,
                             upper_tail_allowance=False):
    """P[max(|Re|, |Im|) of one component <= C] for zero / purely-real /
    purely-imaginary difference components, over arrays of prefix states.

    The two parts are independent: the noise-only part contributes
    ``P(1/2, x)`` and the displaced part the negative-binomial series, with
    ``x = Csq / (q_prev/(d M) + sigma2)``.
    """
    q_prev = np.asarray(q_prev, dtype=np.float64)
    q_cur = np.asarray(q_cur, dtype=np.float64)
    shift = denom * M * sigma2
    p = (q_prev + shift) / (q_cur + shift)
    x = Csq / (q_prev / (denom * M) + sigma2)
    return _ltilde_series(p, x, m + L, upper_tail_allowance)


def component_cdf_ltilde_exact(state: PrefixState, m: int, L: int, C,
                               sigma2: float, M: int,
                               component_class: str):
    """Exact squaring-free component cdf; only valid when the difference
    component is zero, purely real, or purely imaginary.  Vectorized over
    ``C``."""
    if component_class not in (CLASS_ZERO, CLASS_REAL, CLASS_IMAG):
        raise ValueError(
            "exact squaring-free cdf requires a zero, purely-real or "
            f"purely-imaginary component, got {component_class!r}"
        )
    if component_class == CLASS_ZERO and state.q_prev != state.q_cur:
        raise ValueError("zero component must leave the prefix norm unchanged")
    if m < 1:
        raise ValueError("level index m must be >= 1")
    C = np.asarray(C, dtype=np.float64)
    d = state.denominator
    shift = d * M * sigma2
    p = (state.q_prev + shift) / (state.q_cur + shift)
    x = C * C / (state.q_prev / (d * M) + sigma2)
    out = _ltilde_series(np.broadcast_to(p, x.shape), x, m + L)
    return out if out.ndim else float(out)


def component_cdf_ltilde_bounds(state: PrefixState, m: int, L: int, C: float,
                                sigma2: float, M: int):
    """(lower, upper) bounds on the squaring-free component cdf, valid for
    any component class: the modulus cdf at radius C and at sqrt(2) C."""
    lo = component_cdf_linf(state, m, L, C, sigma2, M)
    hi = component_cdf_linf(state, m, L, math.sqrt(2.0) * C, sigma2, M)
    return lo, hi


def component_metric_mgf(state: PrefixState, m: int, L: int, sigma2: float,
                         M: int, s: float) -> float:
    """MGF of the squared component magnitude:
    ``(1 - a_prev s)^(m+L-1) / (1 - a_cur s)^(m+L)`` with
    ``a = ||b||^2/M + sigma2``."""
    d = state.denominator
    a_prev = state.q_prev / (d * M) + sigma2
    a_cur = state.q_cur / (d * M) + sigma2
    if not s < 1.0 / a_cur:
        raise ValueError("MGF argument must satisfy s < 1/(||b_m||^2/M + sigma2)")
    return (1.0 - a_prev * s) ** (m + L - 1) / (1.0 - a_cur * s) ** (m + L)


def sample_sum_representation(state: PrefixState, m: int, L: int, sigma2: float,
                              M: int, rng: np.random.Generator, size=None):
    """Draw the squared component magnitude from its independent-sum form.

    ``t^2 = a/2 * (g + sum_i lam_i)`` with ``a = ||b_m||^2/M + sigma2``,
    ``g ~ chi^2_2`` and each of the ``m+L-1`` terms ``lam_i`` zero with
    probability ``p`` and chi^2_2 otherwise.  Returns a scalar, or an array
    of ``size`` draws.
    """
    d = state.denominator
    shift = d * M * sigma2
    p = (state.q_prev + shift) / (state.q_cur + shift)
    a = state.q_cur / (d * M) + sigma2
    n = size if size is not None else 1
    terms = m + L - 1
    g = rng.chisquare(2, n)
    if terms > 0:
        live = rng.random((n, terms)) >= p
        lam = rng.chisquare(2, (n, terms)) * live
        g = g + lam.sum(axis=1)
    out = 0.5 * a * g
    return out if size is not None else float(out[0])


# ---------------------------------------------------------------------------
# expected node counts
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ComplexityReport:
    """Expected constraint-satisfying nodes per tree level.

    For the exact norms ``per_level`` is the closed-form value and
    ``per_level_upper`` is None; for the squaring-free norm ``per_level``
    is the lower bound and ``per_level_upper`` the upper bound.
    """

    norm: object
    eps: float
    sigma2: float
    M: int
    N: int
    constellation: str
    per_level: np.ndarray
    per_level_upper: np.ndarray | None = None

    @property
    def total(self) -> float:
        return float(self.per_level.sum())

    @property
    def total_upper(self) -> float | None:
        if self.per_level_upper is None:
            return None
        return float(self.per_level_upper.sum())


def _dist_arrays(dist: dict):
    qs = np.array(sorted(dist), dtype=np.int64)
    vs = np.array([dist[q] for q in qs])
    return qs, vs


def expected_nodes(norm, cfg: SystemConfig, eps: float,
                   max_states: int = 200_000) -> ComplexityReport:
    """Expected per-level node counts of the fixed-radius decoder at the
    eps-matched radius, averaged over channel, noise and data.

    The average over symbol prefixes runs over all ordered pairs
    (transmitted, hypothesized); per level this is the difference profile
    of the constellation, and the dynamic program convolves it while
    multiplying the per-level visit factors.
    """
    from .decoder import NormKind  # local import: decoder imports radii from here

    eps = _check_eps(eps)
    M, N, L, sigma2 = cfg.M, cfg.N, cfg.L, cfg.sigma2
    profile = difference_profile(cfg.constellation)
    A = profile.alphabet_size
    d = profile.denominator
    entries = [(e.sq_norm, e.weight / A**2, e.component_class) for e in profile.entries]

    if norm is NormKind.L2:
        csq = radius_l2(eps, N, sigma2)
        dist = {0: 1.0}
        per_level = np.zeros(M)
        for k in range(1, M + 1):
            new: dict = {}
            for q, w, _cls in entries:
                for Q, v in dist.items():
                    key = Q + q
                    new[key] = new.get(key, 0.0) + v * w
            dist = new
            if len(dist) > max_states:
                raise RuntimeError("prefix-norm state space exceeded max_states")
            qs, vs = _dist_arrays(dist)
            x = csq / (qs / (d * M) + sigma2)
            per_level[k - 1] = A**k * float(vs @ _sc.gammainc(k + L, x))
        return ComplexityReport(norm=norm, eps=eps, sigma2=sigma2, M=M, N=N,
                                constellation=cfg.constellation.label,
                                per_level=per_level)

    if norm is NormKind.LINF:
        csq = radius_linf(eps, N, sigma2)
        pref = reg_lower_gamma(1.0, csq / sigma2) ** L
        states = {0: 1.0}
        per_level = np.zeros(M)
        for m in range(1, M + 1):
            qs, vs = _dist_arrays(states)
            new: dict = {}
            for q, w, _cls in entries:
                F = _linf_factor_vec(qs, qs + q, m, L, csq, sigma2, M, d)
                contrib = vs * w * F
                for Q, c in zip((qs + q).tolist(), contrib):
                    new[Q] = new.get(Q, 0.0) + c
            states = new
            if len(states) > max_states:
                raise RuntimeError("prefix-norm state space exceeded max_states")
            per_level[m - 1] = A**m * pref * sum(states.values())
        return ComplexityReport(norm=norm, eps=eps, sigma2=sigma2, M=M, N=N,
                                constellation=cfg.constellation.label,
                                per_level=per_level)

    if norm is NormKind.LTILDEINF:
        csq = radius_ltilde(eps, N, sigma2)
        pref = reg_lower_gamma(0.5, csq / sigma2) ** (2 * L)
        lo_states = {0: 1.0}
        hi_states = {0: 1.0}
        lo_level = np.zeros(M)
        hi_level = np.zeros(M)
        for m in range(1, M + 1):
            for which, states, out in (("lo", lo_states, lo_level),
                                       ("hi", hi_states, hi_level)):
                qs, vs = _dist_arrays(states)
                new: dict = {}
                for q, w, cls in entries:
                    if cls == CLASS_GENERAL:
                        # no closed form: bracket by the modulus cdf at C
                        # (below) and sqrt(2) C (above)
                        scale = 1.0 if which == "lo" else 2.0
                        F = _linf_factor_vec(qs, qs + q, m, L, scale * csq,
                                             sigma2, M, d)
                    else:
                        F = _ltilde_exact_factor_vec(
                            qs, qs + q, m, L, csq, sigma2, M, d,
                            upper_tail_allowance=(which == "hi"),
                        )
                    contrib = vs * w * F
                    for Q, c in zip((qs + q).tolist(), contrib):
                        new[Q] = new.get(Q, 0.0) + c
                if len(new) > max_states:
                    raise RuntimeError("prefix-norm state space exceeded max_states")
                if which == "lo":
                    lo_states = new
                else:
                    hi_states = new
                out[m - 1] = A**m * pref * sum(new.values())
        return ComplexityReport(norm=norm, eps=eps, sigma2=sigma2, M=M, N=N,
                                constellation=cfg.constellation.label,
                                per_level=lo_level, per_level_upper=hi_level)

    raise ValueError(f"unknown norm {norm!r}")


def complexity_lower_bound(cfg: SystemConfig, eps: float) -> float:
    """Simplified lower bound on the total expected node count, valid for
    square systems: ``(1-eps) sum_k sum_i (k/i)^i (1 + B^2 i/(M sigma2))^-k``
    with ``B^2`` the largest squared pairwise symbol distance.
    """
    eps = _check_eps(eps)
    if cfg.M != cfg.N:
        raise ValueError("the simplified lower bound requires M == N")
    B2 = difference_profile(cfg.constellation).max_sq_distance
    M, sigma2 = cfg.M, cfg.sigma2
    total = 0.0
    for k in range(1, M + 1):
        i = np.arange(1, k + 1, dtype=np.float64)
        total += float(np.sum((k / i) ** i * (1.0 + B2 * i / (M * sigma2)) ** (-k)))
    return (1.0 - eps) * total


def scaling_exponent(alpha: float, beta: float, sigma2: float, B2: float) -> float:
    """Asymptotic exponent of the complexity lower bound along
    ``k = ceil(alpha M)``, ``i = ceil(beta M)``:
    ``beta log(alpha/beta) - alpha log(1 + B^2 beta / sigma2)``."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    if not 0.0 < beta <= alpha:
        raise ValueError("beta must lie in (0, alpha]")
    return beta * math.log(alpha / beta) - alpha * math.log1p(B2 * beta / sigma2)


def scaling_term_log(M: int, alpha: float, beta: float, sigma2: float,
                     B2: float, eps: float) -> float:
    """``log`` of the single lower-bound term at ``k = ceil(alpha M)``,
    ``i = ceil(beta M)``; ``log f(M)/M`` converges to
    :func:`scaling_exponent` at rate O(1/M)."""
    eps = _check_eps(eps)
    k = math.ceil(alpha * M)
    i = math.ceil(beta * M)
    return (
        math.log1p(-eps)
        + i * math.log(k / i)
        - k * math.log1p(B2 * i / (M * sigma2))
    )


# ---------------------------------------------------------------------------
# tree-pruning comparison quantities
# ---------------------------------------------------------------------------


def high_snr_visit_coefficient(m_hat: int, L: int, kappa_inf: float) -> float:
    """SNR-free coefficient of the high-SNR visit probability of a node
    whose first symbol error sits at level ``m_hat``.

    ``[P(1, kappa)]^(m_hat+L-1) * sum_l C(m_hat+L-1, l) kappa^-l / (m_hat+L-l)!``;
    decreases from 1 (kappa -> 0) to ``1/(m_hat+L)!`` (kappa -> inf).
    """
    if m_hat < 1:
        raise ValueError("first-error level must be >= 1")
    if not kappa_inf > 0:
        raise ValueError("kappa_inf must be positive")
    n = m_hat + L - 1
    log_g1 = math.log(-math.expm1(-kappa_inf))  # log P(1, kappa)
    l = np.arange(n + 1)
    terms = (
        _sc.gammaln(n + 1) - _sc.gammaln(l + 1) - _sc.gammaln(n - l + 1)
        - l * math.log(kappa_inf)
        - _sc.gammaln(m_hat + L - l + 1)
    )
    return float(np.exp(n * log_g1 + _sc.logsumexp(terms)))


def _inv_upper_tail_log(N: int, t: float) -> float:
    """Solve ``Q(N, x) = exp(-t)`` for ``x`` given ``t = -log(eps)``.

    ``log Q(N, x) = -x + log sum_{i<N} x^i/i!`` is evaluated exactly in
    floats via logsumexp, so this extends the radius computation to eps far
    below the floating-point range.  Newton iteration on the log scale.
    """
    if N == 1:
        return t
    i = np.arange(N)
    lgi = _sc.gammaln(i + 1)
    x = t + (N - 1) * math.log(t + 2.0)
    for _ in range(100):
        lx = math.log(x)
        ls = _sc.logsumexp(i * lx - lgi)
        ls_d = _sc.logsumexp(i[:-1] * lx - lgi[:-1])  # derivative of the sum
        f = t - x + ls
        fp = -1.0 + math.exp(ls_d - ls)
        step = f / fp
        x_new = x - step
        if x_new <= 0:
            x_new = x / 2.0
        if abs(x_new - x) <= 1e-13 * x:
            return x_new
        x = x_new
    return x


def radii_ratio(N: int, eps: float | None = None, *,
                complement: float | None = None,
                neg_log_eps: float | None = None) -> float:
    """Radii ratio ``C_2^2 / C_inf^2`` of the eps-matched radii.

    Exactly one parametrization must be given: ``eps`` itself,
    ``complement = 1 - eps`` (usable when eps is within machine precision
    of 1), or ``neg_log_eps = -log(eps)`` (usable when eps underflows).
    Nondecreasing in eps, from 1 (eps -> 0) to ``(N!)^(1/N)`` (eps -> 1).
    """
    given = [v is not None for v in (eps, complement, neg_log_eps)]
    if sum(given) != 1:
        raise ValueError("give exactly one of eps, complement, neg_log_eps")
    if eps is not None:
        eps = _check_eps(eps)
        kappa2 = inv_reg_lower_gamma(N, 1.0 - eps)
        kappa_inf = _kappa_inf_from_log1m(N, math.log1p(-eps))
    elif complement is not None:
        if not 0.0 < complement <= 1.0:
            raise ValueError("complement must lie in (0, 1]")
        kappa2 = inv_reg_lower_gamma(N, complement)
        kappa_inf = _kappa_inf_from_log1m(N, math.log(complement))
    else:
        t = float(neg_log_eps)
        if not t > 0:
            raise ValueError("neg_log_eps must be positive")
        if t <= 40.0:
            return radii_ratio(N, math.exp(-t))
        # eps below ~1e-17: corrections of order eps vanish at double precision
        kappa2 = _inv_upper_tail_log(N, t)
        kappa_inf = t + math.log(N)
    return kappa2 / kappa_inf


@dataclass(frozen=True, eq=False)
class TreePruningReport:
    """High-SNR pruning comparison of the box against the sphere decoder."""

    eps: float
    M: int
    N: int
    kappa_inf: float  # C_inf^2 / sigma2
    kappa2: float  # C_2^2 / sigma2
    rho_c: float  # C_2^2 / C_inf^2
    a_values: np.ndarray  # visit coefficient per first-error level 1..M
    k_bar: int  # deepest level where the box prunes every node harder
    m_bar: tuple  # per level k: deepest first-error level pruned softer (or None)
    k_bar_inst: int  # realization-wise guarantee depth
    v_sphere: np.ndarray  # search-space volumes per level
    v_box: np.ndarray


def tree_pruning_report(cfg: SystemConfig, eps: float) -> TreePruningReport:
    """All closed-form pruning-comparison quantities for one (system, eps)."""
    eps = _check_eps(eps)
    M, N, L, sigma2 = cfg.M, cfg.N, cfg.L, cfg.sigma2
    kappa_inf = _kappa_inf_from_log1m(N, math.log1p(-eps))
    kappa2 = inv_reg_lower_gamma(N, 1.0 - eps)
    rho_c = kappa2 / kappa_inf

    a_values = np.array(
        [high_snr_visit_coefficient(mh, L, kappa_inf) for mh in range(1, M + 1)]
    )

    k_bar = 0
    for k in range(1, M + 1):
        if math.exp(_sc.gammaln(k + L + 1) / (k + L)) <= rho_c:
            k_bar = k

    log_rho = math.log(rho_c)
    m_bar = []
    for k in range(1, M + 1):
        rhs = (k + L) * log_rho - _sc.gammaln(k + L + 1)
        best = None
        for m in range(1, k + 1):
            if -_sc.gammaln(m + L + 1) > rhs:
                best = m
        m_bar.append(best)

    k_bar_inst = max(math.floor(rho_c) - L, 0)

    k = np.arange(1, M + 1)
    c2sq = sigma2 * kappa2
    cinfsq = sigma2 * kappa_inf
    v_sphere = np.exp(k * math.log(math.pi * c2sq) - _sc.gammaln(k + 1))
    v_box = np.exp(k * math.log(math.pi * cinfsq))

    return TreePruningReport(
        eps=eps, M=M, N=N,
        kappa_inf=kappa_inf, kappa2=kappa2, rho_c=rho_c,
        a_values=a_values, k_bar=k_bar, m_bar=tuple(m_bar),
        k_bar_inst=k_bar_inst, v_sphere=v_sphere, v_box=v_box,
    )


def asymptotic_visit_probability(norm, k: int, L: int, m_hat: int,
                                 b_sq_norm: float, kappa: float, rho: float,
                                 M: int) -> float:
    """High-SNR approximation of the probability that a node with difference
    prefix of squared norm ``b_sq_norm`` (first symbol error at level
    ``m_hat``) is visited.

    Box decoder: ``A(m_hat) kappa^(k+L) (rho b^2/M)^-(k+L)``;
    sphere decoder: ``kappa^(k+L)/(k+L)! (rho b^2/M)^-(k+L)``.
    """
    from .decoder import NormKind

    if not b_sq_norm > 0:
        raise ValueError("difference norm must be positive")
    base = (k + L) * (math.log(kappa) - math.log(rho * b_sq_norm / M))
    if norm is NormKind.LINF:
        if not 1 <= m_hat <= k:
            raise ValueError("first-error level must lie in [1, k]")
        return high_snr_visit_coefficient(m_hat, L, kappa) * math.exp(base)
    if norm is NormKind.L2:
        return math.exp(base - _sc.gammaln(k + L + 1))
    raise ValueError("asymptotic visit probability is defined for L2 and LINF")


# ---------------------------------------------------------------------------
# pairwise error probability bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairwiseErrorBounds:
    """Evaluable pairwise-error bound curves for a fixed difference vector.

    ``beta`` is the asymptotic SNR gap between the box-decoder upper bound
    and the minimum-distance lower bound; ``beta_tilde`` the analogue for
    the squaring-free decoder (sqrt(2N) in place of sqrt(N)).
    """

    N: int
    M: int
    b_sq_norm: float

    def __post_init__(self):
        if not self.b_sq_norm > 0:
            raise ValueError("difference norm must be positive")

    def ub_inf(self, rho):
        rho = np.asarray(rho, dtype=np.float64)
        c = self.b_sq_norm / (2.0 * (math.sqrt(self.N) + 1.0) ** 2 * self.M)
        out = 2.0**self.N * (1.0 + rho * c) ** (-self.N)
        return out if out.ndim else float(out)

    def ub_ml(self, rho):
        rho = np.asarray(rho, dtype=np.float64)
        out = 2.0**self.N * (1.0 + rho * self.b_sq_norm / (8.0 * self.M)) ** (-self.N)
        return out if out.ndim else float(out)

    def lb_ml(self, rho):
        rho = np.asarray(rho, dtype=np.float64)
        n = self.N
        lead = math.exp(
            math.log(0.5) + _lchoose(2 * n, n) - n * math.log(4.0)
        )
        out = lead * (1.0 + rho * self.b_sq_norm / (4.0 * self.M)) ** (-n)
        return out if out.ndim else float(out)

    @property
    def beta(self) -> float:
        return self._gap(math.sqrt(self.N))

    @property
    def beta_tilde(self) -> float:
        return self._gap(math.sqrt(2.0 * self.N))

    def _gap(self, root: float) -> float:
        n = self.N
        return 4.0 * (root + 1.0) ** 2 * math.exp(
            -(_lchoose(2 * n, n) - math.log(2.0)) / n
        )


def _lchoose(n: int, k: int) -> float:
    return float(_sc.gammaln(n + 1) - _sc.gammaln(k + 1) - _sc.gammaln(n - k + 1))


def pairwise_error_bounds(N: int, M: int, b_sq_norm: float) -> PairwiseErrorBounds:
    """Bound curves and SNR-gap constants for one error vector norm."""
    return PairwiseErrorBounds(N=int(N), M=int(M), b_sq_norm=float(b_sq_norm))
