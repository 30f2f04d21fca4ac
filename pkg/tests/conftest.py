"""Shared independent oracles for the test suite.

These deliberately avoid the library's own evaluation paths: series /
bisection for the gamma functions, direct enumeration for counts and
expected-complexity sums.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

import spherelab as sl
from spherelab.decoder import NormKind


def series_reg_gamma_int(a: int, x: float) -> float:
    """Finite-series oracle for integer order: 1 - e^-x sum_{i<a} x^i/i!."""
    acc = 0.0
    term = 1.0
    for i in range(a):
        if i > 0:
            term *= x / i
        acc += term
    return 1.0 - math.exp(-x) * acc


def bisect_inverse(forward, y: float, lo: float = 0.0, hi: float = 1e6,
                   iters: int = 200) -> float:
    """Plain bisection oracle for a monotone cdf-like function."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if forward(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def metric_of(z: np.ndarray, norm: NormKind, axis=0) -> np.ndarray:
    if norm is NormKind.L2:
        return np.sqrt((np.abs(z) ** 2).sum(axis=axis))
    if norm is NormKind.LINF:
        return np.abs(z).max(axis=axis)
    return np.maximum(np.abs(z.real), np.abs(z.imag)).max(axis=axis)


def brute_force_level_counts(problem, norm: NormKind, C: float) -> np.ndarray:
    """Count constraint-satisfying prefixes per level by full enumeration."""
    pts = problem.constellation.points
    A = pts.size
    M, N = problem.M, problem.N
    counts = np.zeros(M, dtype=np.int64)
    for k in range(1, M + 1):
        # enumerate prefixes: level j fixes position M - j
        combos = np.array(list(itertools.product(range(A), repeat=k)))
        D = np.zeros((M, combos.shape[0]), dtype=np.complex128)
        for j in range(1, k + 1):
            D[M - j] = pts[combos[:, j - 1]]
        z_full = problem.y[:, None] - np.vstack(
            [problem.R @ D, np.zeros((N - M, combos.shape[0]))]
        )
        zk = z_full[M - k :, :]  # bottom k + L rows
        counts[k - 1] = int((metric_of(zk, norm) <= C).sum())
    return counts


def brute_force_expected_nodes(norm: NormKind, cfg, eps: float):
    """Direct sum over all ordered prefix pairs, sharing only the
    per-component cdf primitives with the library.

    Returns per-level array (pair of arrays for the squaring-free norm).
    """
    from spherelab import analytic

    pts = cfg.constellation.points
    A = pts.size
    M, N, L, s2 = cfg.M, cfg.N, cfg.L, cfg.sigma2
    prof = sl.difference_profile(cfg.constellation)
    d = prof.denominator

    def classify(v):
        re = abs(v.real) > 1e-9
        im = abs(v.imag) > 1e-9
        if not re and not im:
            return "zero"
        if re and not im:
            return "real"
        if im and not re:
            return "imag"
        return "general"

    if norm is NormKind.L2:
        csq = analytic.radius_l2(eps, N, s2)
    elif norm is NormKind.LINF:
        csq = analytic.radius_linf(eps, N, s2)
    else:
        csq = analytic.radius_ltilde(eps, N, s2)
    C = math.sqrt(csq)

    lo_levels = np.zeros(M)
    hi_levels = np.zeros(M)
    for k in range(1, M + 1):
        acc_lo = 0.0
        acc_hi = 0.0
        for dk in itertools.product(range(A), repeat=k):
            for dpk in itertools.product(range(A), repeat=k):
                # levels are exchangeable in the sum; take tuple entry i as
                # the level-(i+1) component
                b = [pts[dpk[i]] - pts[dk[i]] for i in range(k)]
                if norm is NormKind.L2:
                    q = sum(abs(v) ** 2 for v in b)
                    acc_lo += analytic.reg_lower_gamma(k + L, csq / (q / M + s2))
                    continue
                plo = 1.0
                phi = 1.0
                qprev = 0
                for m in range(1, k + 1):
                    qcur = qprev + int(round(abs(b[m - 1]) ** 2 * d))
                    st = analytic.PrefixState(q_prev=qprev, q_cur=qcur,
                                              denominator=d)
                    if norm is NormKind.LINF:
                        f = analytic.component_cdf_linf(st, m, L, C, s2, M)
                        plo *= f
                        phi *= f
                    else:
                        cls = classify(b[m - 1])
                        if cls == "general":
                            flo, fhi = analytic.component_cdf_ltilde_bounds(
                                st, m, L, C, s2, M)
                        else:
                            flo = fhi = analytic.component_cdf_ltilde_exact(
                                st, m, L, C, s2, M, cls)
                        plo *= flo
                        phi *= fhi
                    qprev = qcur
                acc_lo += plo
                acc_hi += phi
        if norm is NormKind.L2:
            lo_levels[k - 1] = acc_lo / A**k
        else:
            if norm is NormKind.LINF:
                pref = analytic.reg_lower_gamma(1.0, csq / s2) ** L
            else:
                pref = analytic.reg_lower_gamma(0.5, csq / s2) ** (2 * L)
            lo_levels[k - 1] = pref * acc_lo / A**k
            hi_levels[k - 1] = pref * acc_hi / A**k
    if norm is NormKind.LTILDEINF:
        return lo_levels, hi_levels
    return lo_levels


@pytest.fixture(scope="session")
def qam4():
    return sl.make_constellation("4qam")


@pytest.fixture(scope="session")
def bpsk():
    return sl.make_constellation("bpsk")


@pytest.fixture(scope="session")
def qam16():
    return sl.make_constellation("16qam")
