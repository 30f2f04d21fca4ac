"""Regularized lower incomplete gamma function, its inverse, and the
binomial / negative-binomial mixture weights of the partial-metric cdfs.

Everything here is pure and stateless; all functions accept scalars or
arrays in the "sweep" argument and broadcast with numpy rules.
"""

from __future__ import annotations

import numpy as np
from scipy import special as _sc

__all__ = [
    "reg_lower_gamma",
    "inv_reg_lower_gamma",
    "binomial_weight",
    "negative_binomial_weight",
]


def reg_lower_gamma(a, x):
    """Regularized lower incomplete gamma function ``P(a, x)``.

    ``P(a, x) = (1/Gamma(a)) * int_0^x t^(a-1) exp(-t) dt`` for real order
    ``a > 0`` and ``x >= 0``.  ``P(a, 0) = 0``, ``P`` is nondecreasing in
    ``x`` and tends to 1 as ``x -> inf``.  Integer and half-integer orders
    go through the same code path.
    """
    a = float(a)
    if not a > 0:
        raise ValueError(f"order must be positive, got a={a}")
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0):
        raise ValueError("argument of the incomplete gamma must be nonnegative")
    out = _sc.gammainc(a, x)
    return out if out.ndim else float(out)


def inv_reg_lower_gamma(a, y):
    """Inverse of :func:`reg_lower_gamma` in its second argument.

    Returns ``x >= 0`` with ``P(a, x) = y`` for ``y`` in ``[0, 1)``.
    ``y = 1`` (or above) is rejected: the preimage is infinite, which in
    radius computations would mean an unbounded search region.
    """
    a = float(a)
    if not a > 0:
        raise ValueError(f"order must be positive, got a={a}")
    y = np.asarray(y, dtype=np.float64)
    if np.any(y < 0) or np.any(y >= 1):
        raise ValueError("probability must lie in [0, 1)")
    out = _sc.gammaincinv(a, y)
    return out if out.ndim else float(out)


def _log_binomial_weight(n, l, p):
    """``log C(n, l) + l log p + (n-l) log(1-p)`` with 0*log(0) = 0.

    ``l`` and ``p`` broadcast; evaluated via gammaln so that large ``n``
    cannot overflow.
    """
    l = np.asarray(l)
    return (
        _sc.gammaln(n + 1)
        - _sc.gammaln(l + 1)
        - _sc.gammaln(n - l + 1)
        + _sc.xlogy(l, p)
        + _sc.xlog1py(n - l, -p)
    )


def _log_negative_binomial_weight(r, s, p):
    """``log C(s+r-1, r-1) + r log p + s log(1-p)`` with 0*log(0) = 0."""
    s = np.asarray(s)
    return (
        _sc.gammaln(s + r)
        - _sc.gammaln(r)
        - _sc.gammaln(s + 1)
        + _sc.xlogy(r, p)
        + _sc.xlog1py(s, -p)
    )


def binomial_weight(l, num_terms, p):
    """Binomial mixture weight ``C(n, l) p^l (1-p)^(n-l)``, ``n = num_terms - 1``.

    ``num_terms`` is the number of mixture components of a per-component
    partial-metric cdf; the weights over ``l = 0..n`` sum to one.
    """
    n = int(num_terms) - 1
    if n < 0:
        raise ValueError("num_terms must be at least 1")
    l_arr = np.asarray(l)
    if np.any(l_arr < 0) or np.any(l_arr > n):
        raise ValueError(f"index out of range: l must lie in [0, {n}]")
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    out = np.exp(_log_binomial_weight(n, l_arr, p))
    return out if out.ndim else float(out)


def negative_binomial_weight(s, num_terms, p):
    """Negative-binomial weight ``C(s+r-1, r-1) p^r (1-p)^s``, ``r = num_terms``.

    Weights over ``s = 0, 1, ...`` sum to one for any ``p`` in ``(0, 1]``;
    at ``p = 1`` all mass sits at ``s = 0``.  These are the series weights
    of the squaring-free per-component cdf.
    """
    r = int(num_terms)
    if r < 1:
        raise ValueError("num_terms must be at least 1")
    s_arr = np.asarray(s)
    if np.any(s_arr < 0):
        raise ValueError("series index must be nonnegative")
    p = float(p)
    if not 0.0 < p <= 1.0:
        raise ValueError("p must lie in (0, 1]")
    out = np.exp(_log_negative_binomial_weight(r, s_arr, p))
    return out if out.ndim else float(out)
