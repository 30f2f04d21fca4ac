"""Closed-form engine: radii, component cdfs, DP node counts, pruning
quantities, scaling exponent, pairwise-error bounds."""

import math

import numpy as np
import pytest

import spherelab as sl
from conftest import brute_force_expected_nodes
from spherelab import analytic
from spherelab.analytic import (
    PrefixState,
    asymptotic_visit_probability,
    complexity_lower_bound,
    component_cdf_linf,
    component_cdf_ltilde_bounds,
    component_cdf_ltilde_exact,
    component_metric_mgf,
    expected_nodes,
    high_snr_visit_coefficient,
    pairwise_error_bounds,
    radii_ratio,
    radius_l2,
    radius_linf,
    radius_ltilde,
    sample_sum_representation,
    scaling_exponent,
    scaling_term_log,
    tree_pruning_report,
)
from spherelab.decoder import NormKind
from spherelab.model import CLASS_GENERAL, CLASS_REAL, CLASS_ZERO, make_rng
from spherelab.montecarlo import ks_critical_value, ks_statistic
from spherelab.special import reg_lower_gamma


# --- radii ------------------------------------------------------------------


def test_radius_l2_scalar_case():
    for eps in (0.5, 1e-2, 1e-6):
        assert radius_l2(eps, 1, 2.0) == pytest.approx(-2.0 * math.log(eps), rel=1e-10)
        assert radius_linf(eps, 1, 2.0) == pytest.approx(
            radius_l2(eps, 1, 2.0), rel=1e-10
        )


def test_radius_l2_diverges_as_eps_vanishes():
    vals = [radius_l2(e, 4, 1.0) for e in (1e-2, 1e-4, 1e-8, 1e-12)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_radius_l2_linear_scaling_in_system_size():
    # fixed eps: the sphere radius grows linearly with the dimension
    eps, s2 = 0.1, 1.0
    n = 256
    assert radius_l2(eps, n, s2) / (s2 * n) == pytest.approx(1.0, abs=0.1)


def test_radius_linf_logarithmic_scaling():
    eps, s2 = 0.1, 1.0
    r1 = radius_linf(eps, 10**3, s2) / (s2 * math.log(10**3))
    r2 = radius_linf(eps, 10**6, s2) / (s2 * math.log(10**6))
    r3 = radius_linf(eps, 10**9, s2) / (s2 * math.log(10**9))
    assert abs(r3 - 1.0) < abs(r2 - 1.0) < abs(r1 - 1.0)
    assert r3 == pytest.approx(1.0, abs=0.15)


def test_radius_linf_containment_identity():
    for eps in (0.3, 1e-3, 1e-9):
        for n in (1, 2, 6, 16):
            csq = radius_linf(eps, n, 0.7)
            p = reg_lower_gamma(1.0, csq / 0.7) ** n
            assert p == pytest.approx(1.0 - eps, rel=1e-10)


def test_radius_ltilde_identities():
    for eps in (0.3, 1e-2, 1e-5):
        for n in (1, 2, 6):
            s2 = 0.25
            ct = radius_ltilde(eps, n, s2)
            p = reg_lower_gamma(0.5, ct / s2) ** (2 * n)
            assert p == pytest.approx(1.0 - eps, rel=1e-9)
            cinf = radius_linf(eps, n, s2)
            assert ct >= cinf / 2.0 - 1e-12
            assert ct <= cinf + 1e-12


def test_radius_rejects_bad_eps():
    for fn in (radius_l2, radius_linf, radius_ltilde):
        with pytest.raises(ValueError):
            fn(0.0, 4, 1.0)
        with pytest.raises(ValueError):
            fn(1.0, 4, 1.0)


# --- component cdfs ---------------------------------------------------------


def _vu_component_samples(rng, n, b_abs, q_prev, denom, m, L, sigma2, M):
    """Direct construction: scaled chi displacement plus complex Gaussian."""
    v = b_abs * np.sqrt(rng.chisquare(2 * (m + L), n) / (2 * M))
    sig_m2 = q_prev / (denom * M) + sigma2
    u = np.sqrt(sig_m2 / 2) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    return v, u


def test_component_cdf_linf_pure_noise():
    s2, M = 0.3, 4
    st = PrefixState(q_prev=0, q_cur=0, denominator=1)
    for C in (0.2, 0.8, 2.0):
        got = component_cdf_linf(st, 3, 1, C, s2, M)
        assert got == pytest.approx(1.0 - math.exp(-C * C / s2), rel=1e-12)


def test_component_cdf_linf_first_level_single_term():
    # m = 1, L = 0, empty prefix: one mixture term
    s2, M = 0.2, 2
    st = PrefixState(q_prev=0, q_cur=2, denominator=1)
    C = 0.9
    expect = reg_lower_gamma(1.0, C * C / (2 / (1 * M) + s2))
    assert component_cdf_linf(st, 1, 0, C, s2, M) == pytest.approx(expect, rel=1e-12)


def test_component_cdf_linf_against_direct_sampling():
    rng = make_rng(42)
    n = 100_000
    denom, M, L, s2 = 1, 4, 1, 0.05
    cases = [(2, 0, 2), (3, 2, 4), (4, 4, 8)]  # (m, q_prev, q_cur)
    crit = ks_critical_value(n)
    for m, qp, qc in cases:
        st = PrefixState(q_prev=qp, q_cur=qc, denominator=denom)
        b_abs = math.sqrt((qc - qp) / denom)
        v, u = _vu_component_samples(rng, n, b_abs, qp, denom, m, L, s2, M)
        samples = np.abs(v + u)
        stat = ks_statistic(samples,
                            lambda t: component_cdf_linf(st, m, L, t, s2, M))
        assert stat < crit, f"m={m}: ks={stat:.5f} crit={crit:.5f}"


def test_component_cdf_ltilde_zero_component():
    s2, M = 0.4, 3
    st = PrefixState(q_prev=0, q_cur=0, denominator=1)
    C = 0.8
    got = component_cdf_ltilde_exact(st, 1, 0, C, s2, M, CLASS_ZERO)
    half = reg_lower_gamma(0.5, C * C / s2)
    assert got == pytest.approx(half * half, rel=1e-11)


def test_component_cdf_ltilde_against_direct_sampling():
    rng = make_rng(43)
    n = 100_000
    denom, M, L, s2 = 1, 4, 0, 0.05
    crit = ks_critical_value(n)
    for m, qp, qc in [(1, 0, 2), (3, 2, 4)]:
        st = PrefixState(q_prev=qp, q_cur=qc, denominator=denom)
        b_abs = math.sqrt((qc - qp) / denom)
        v, u = _vu_component_samples(rng, n, b_abs, qp, denom, m, L, s2, M)
        samples = np.maximum(np.abs(v + u.real), np.abs(u.imag))  # purely real b
        stat = ks_statistic(
            samples,
            lambda t: component_cdf_ltilde_exact(st, m, L, t, s2, M, CLASS_REAL),
        )
        assert stat < crit, f"m={m}: ks={stat:.5f} crit={crit:.5f}"


def test_component_cdf_ltilde_rejects_general_class():
    st = PrefixState(q_prev=0, q_cur=4, denominator=1)
    with pytest.raises(ValueError):
        component_cdf_ltilde_exact(st, 1, 0, 1.0, 0.1, 2, CLASS_GENERAL)
    with pytest.raises(ValueError):
        component_cdf_ltilde_exact(
            PrefixState(q_prev=0, q_cur=2, denominator=1), 1, 0, 1.0, 0.1, 2,
            CLASS_ZERO,
        )


def test_component_cdf_ltilde_bounds_sandwich():
    s2, M = 0.1, 4
    for (qp, qc, cls) in [(0, 0, CLASS_ZERO), (0, 2, CLASS_REAL), (2, 4, CLASS_REAL)]:
        st = PrefixState(q_prev=qp, q_cur=qc, denominator=1)
        for C in (0.3, 0.8, 1.5):
            lo, hi = component_cdf_ltilde_bounds(st, 2, 1, C, s2, M)
            assert lo <= hi + 1e-14
            exact = component_cdf_ltilde_exact(st, 2, 1, C, s2, M, cls)
            assert lo - 1e-12 <= exact <= hi + 1e-12
    st = PrefixState(q_prev=0, q_cur=4, denominator=1)
    lo, hi = component_cdf_ltilde_bounds(st, 1, 0, 80.0, s2, M)
    assert lo == pytest.approx(1.0, abs=1e-12)
    assert hi == pytest.approx(1.0, abs=1e-12)


def test_general_class_component_within_bounds():
    # statistical check: empirical squaring-free cdf of a general component
    # sits between the two modulus-cdf bounds
    rng = make_rng(44)
    n = 100_000
    denom, M, L, s2 = 1, 4, 0, 0.05
    m, qp, qc = 2, 2, 6
    st = PrefixState(q_prev=qp, q_cur=qc, denominator=denom)
    b = math.sqrt((qc - qp) / (2.0 * denom)) * (1 + 1j)  # general, |b|^2 = qc - qp
    v = np.sqrt(rng.chisquare(2 * (m + L), n) / (2 * M))  # diagonal R entry
    sig_m2 = qp / (denom * M) + s2
    u = np.sqrt(sig_m2 / 2) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    z = v * b + u
    samples = np.maximum(np.abs(z.real), np.abs(z.imag))
    for C in (0.2, 0.5, 1.0):
        lo, hi = component_cdf_ltilde_bounds(st, m, L, C, s2, M)
        emp = float((samples <= C).mean())
        se = 3.0 * math.sqrt(max(emp * (1 - emp), 1e-9) / n)
        assert lo - se <= emp <= hi + se


# --- sum representation and MGF ---------------------------------------------


def test_sum_representation_pure_noise_is_exponential():
    rng = make_rng(45)
    st = PrefixState(q_prev=0, q_cur=0, denominator=1)
    s2 = 0.7
    x = sample_sum_representation(st, 3, 0, s2, 4, rng, size=200_000)
    # p = 1 kills every mixture term: scaled chi^2_2 = exponential, mean s2
    assert x.mean() == pytest.approx(s2, rel=0.02)
    crit = ks_critical_value(x.size)
    stat = ks_statistic(x, lambda t: 1.0 - np.exp(-np.asarray(t) / s2))
    assert stat < crit


def test_sum_representation_matches_component_cdf():
    rng = make_rng(46)
    st = PrefixState(q_prev=2, q_cur=4, denominator=1)
    m, L, s2, M = 3, 1, 0.05, 4
    x = sample_sum_representation(st, m, L, s2, M, rng, size=100_000)
    cdf = lambda t: component_cdf_linf(st, m, L, np.sqrt(np.clip(t, 0, None)),
                                       s2, M)
    stat = ks_statistic(x, cdf)
    assert stat < ks_critical_value(x.size)


def test_sum_representation_mgf():
    rng = make_rng(47)
    st = PrefixState(q_prev=2, q_cur=6, denominator=1)
    m, L, s2, M = 2, 0, 0.1, 4
    x = sample_sum_representation(st, m, L, s2, M, rng, size=400_000)
    emp = np.exp(-x)
    model = component_metric_mgf(st, m, L, s2, M, -1.0)
    se = emp.std() / math.sqrt(emp.size)
    assert abs(emp.mean() - model) <= 3 * se


def test_mgf_telescopes_to_chi_square_form():
    # product over levels times the noise-tail factor collapses
    s2, M, L, denom = 0.2, 3, 2, 1
    qs = [0, 2, 4, 8]  # prefix norms after each level
    s = -0.9
    prod = (1.0 - s2 * s) ** (-L)
    for m in range(1, 4):
        st = PrefixState(q_prev=qs[m - 1], q_cur=qs[m], denominator=denom)
        prod *= component_metric_mgf(st, m, L, s2, M, s)
    a_k = qs[-1] / (denom * M) + s2
    assert prod == pytest.approx((1.0 - a_k * s) ** (-(3 + L)), rel=1e-12)


# --- expected node counts ----------------------------------------------------


def test_expected_nodes_scalar_bpsk(bpsk):
    # M = N = 1: two difference values, direct formula (no half factor:
    # the level sum runs over ordered symbol pairs)
    s2 = 0.4
    cfg = sl.SystemConfig(M=1, N=1, sigma2=s2, constellation=bpsk)
    eps = 1e-2
    rep = expected_nodes(NormKind.L2, cfg, eps)
    csq = radius_l2(eps, 1, s2)
    expect = reg_lower_gamma(1.0, csq / s2) + reg_lower_gamma(1.0, csq / (4.0 + s2))
    assert rep.per_level[0] == pytest.approx(expect, rel=1e-12)


@pytest.mark.parametrize("norm", [NormKind.L2, NormKind.LINF, NormKind.LTILDEINF])
@pytest.mark.parametrize("mm", [2, 3])
def test_dp_matches_brute_force(norm, mm, qam4):
    cfg = sl.SystemConfig(M=mm, N=mm, sigma2=10 ** (-1.5), constellation=qam4)
    eps = 1e-2
    rep = expected_nodes(norm, cfg, eps)
    oracle = brute_force_expected_nodes(norm, cfg, eps)
    if norm is NormKind.LTILDEINF:
        lo, hi = oracle
        assert np.allclose(rep.per_level, lo, rtol=1e-10)
        assert np.allclose(rep.per_level_upper, hi, rtol=1e-10)
        assert np.all(rep.per_level <= rep.per_level_upper + 1e-14)
    else:
        assert np.allclose(rep.per_level, oracle, rtol=1e-10)


def test_dp_with_receive_excess_matches_brute_force(qam4):
    cfg = sl.SystemConfig(M=2, N=4, sigma2=10 ** (-1.0), constellation=qam4)
    for norm in (NormKind.L2, NormKind.LINF):
        rep = expected_nodes(norm, cfg, 5e-2)
        oracle = brute_force_expected_nodes(norm, cfg, 5e-2)
        assert np.allclose(rep.per_level, oracle, rtol=1e-10)


def test_expected_nodes_bounded_by_alphabet_power(qam4, qam16):
    for c in (qam4, qam16):
        cfg = sl.SystemConfig(M=4, N=4, sigma2=0.5, constellation=c)
        for norm in (NormKind.L2, NormKind.LINF):
            rep = expected_nodes(norm, cfg, 0.3)
            k = np.arange(1, 5)
            assert np.all(rep.per_level <= c.size**k + 1e-9)
            assert np.all(rep.per_level >= 0)


def test_lower_bound_examples(bpsk):
    s2 = 0.4
    cfg = sl.SystemConfig(M=1, N=1, sigma2=s2, constellation=bpsk)
    lb = complexity_lower_bound(cfg, 0.1)
    assert lb == pytest.approx(0.9 / (1.0 + 4.0 / s2), rel=1e-12)
    assert complexity_lower_bound(cfg, 1.0 - 1e-12) <= 1e-11


def test_lower_bound_requires_square_system(qam4):
    cfg = sl.SystemConfig(M=2, N=3, sigma2=0.1, constellation=qam4)
    with pytest.raises(ValueError):
        complexity_lower_bound(cfg, 0.1)


def test_lower_bound_below_exact_totals(qam4):
    for mm in (2, 3, 4):
        for eps in (1e-1, 1e-3):
            for snr in (5.0, 15.0):
                cfg = sl.SystemConfig(M=mm, N=mm,
                                      sigma2=sl.sigma2_from_snr_db(snr),
                                      constellation=qam4)
                lb = complexity_lower_bound(cfg, eps)
                assert lb <= expected_nodes(NormKind.LINF, cfg, eps).total + 1e-9
                assert lb <= expected_nodes(NormKind.L2, cfg, eps).total + 1e-9


# --- scaling exponent --------------------------------------------------------


def test_scaling_exponent_signs():
    s2, B2 = 20.0, 4.0
    assert scaling_exponent(0.5, 0.5, s2, B2) < 0  # beta = alpha
    alpha_max = min(2.0 * s2 * (math.sqrt(2) - 1) / B2, 1.0)
    alpha = 0.9 * alpha_max
    assert scaling_exponent(alpha, alpha / 2.0, s2, B2) > 0
    with pytest.raises(ValueError):
        scaling_exponent(0.0, 0.1, s2, B2)
    with pytest.raises(ValueError):
        scaling_exponent(0.5, 0.6, s2, B2)


def test_scaling_term_converges_at_rate_one_over_m():
    s2, B2, eps = 20.0, 4.0, 1e-2
    alpha, beta = 0.5, 0.25
    gamma = scaling_exponent(alpha, beta, s2, B2)
    assert gamma > 0
    errs = [abs(scaling_term_log(M, alpha, beta, s2, B2, eps) / M - gamma)
            for M in (64, 128, 256)]
    assert errs[0] > errs[1] > errs[2]
    # alpha*M and beta*M integral: the error is exactly |log(1-eps)|/M
    assert errs[0] / errs[1] == pytest.approx(2.0, rel=1e-9)
    assert errs[1] / errs[2] == pytest.approx(2.0, rel=1e-9)


# --- pruning-comparison quantities -------------------------------------------


def test_visit_coefficient_limits_and_monotonicity():
    for m_hat, L in [(1, 0), (3, 0), (2, 2), (5, 1)]:
        lo_lim = math.exp(-math.lgamma(m_hat + L + 1))
        assert high_snr_visit_coefficient(m_hat, L, 1e-9) == pytest.approx(1.0, abs=1e-6)
        assert high_snr_visit_coefficient(m_hat, L, 1e9) == pytest.approx(
            lo_lim, abs=1e-6
        )
        grid = np.logspace(-6, 6, 120)
        vals = [high_snr_visit_coefficient(m_hat, L, k) for k in grid]
        assert np.all(np.diff(vals) <= 1e-12)
        assert all(lo_lim - 1e-12 <= v <= 1.0 + 1e-12 for v in vals)
    assert high_snr_visit_coefficient(1, 0, 3.7) == 1.0  # single-term case


def test_radii_ratio_limits_and_monotonicity():
    n = 6
    # eps -> 1: ratio approaches (N!)^(1/N); complement parametrization
    target = math.exp(math.lgamma(n + 1) / n)
    assert radii_ratio(n, complement=1e-300) == pytest.approx(target, abs=1e-3)
    # eps -> 0: ratio approaches 1; log parametrization reaches far below
    # the floating-point range
    assert radii_ratio(n, neg_log_eps=1e5) == pytest.approx(1.0, abs=1e-3)
    assert radii_ratio(n, neg_log_eps=1e7) == pytest.approx(1.0, abs=1e-5)
    grid = 1.0 / (1.0 + np.exp(-np.linspace(-20, 20, 50)))  # 50 eps values
    vals = [radii_ratio(n, float(e)) for e in grid]
    assert np.all(np.diff(vals) >= -1e-12)
    assert all(1.0 - 1e-12 <= v <= target + 1e-12 for v in vals)
    # consistency across parametrizations
    assert radii_ratio(n, 1e-10) == pytest.approx(
        radii_ratio(n, neg_log_eps=-math.log(1e-10)), rel=1e-9
    )
    with pytest.raises(ValueError):
        radii_ratio(n)
    with pytest.raises(ValueError):
        radii_ratio(n, 0.1, neg_log_eps=3.0)


def test_tree_pruning_report_reference_depths(qam4):
    cfg = sl.SystemConfig(M=6, N=6, sigma2=sl.sigma2_from_snr_db(15),
                          constellation=qam4)
    assert tree_pruning_report(cfg, 1e-2).k_bar == 3
    assert tree_pruning_report(cfg, 1e-5).k_bar == 2


def test_tree_pruning_report_consistency(qam4):
    cfg = sl.SystemConfig(M=5, N=7, sigma2=0.05, constellation=qam4)
    rep = tree_pruning_report(cfg, 1e-3)
    L = cfg.N - cfg.M
    # coefficient bounds per first-error level
    for mh in range(1, cfg.M + 1):
        lo = math.exp(-math.lgamma(mh + L + 1))
        assert lo - 1e-12 <= rep.a_values[mh - 1] <= 1.0 + 1e-12
    assert 1.0 <= rep.rho_c <= math.exp(math.lgamma(cfg.N + 1) / cfg.N)
    assert rep.k_bar_inst == max(math.floor(rep.rho_c) - L, 0)
    assert rep.k_bar_inst <= max(rep.k_bar, 0) or rep.k_bar == 0
    # deeper-than-k_bar levels admit a softer-pruned first-error range
    for k in range(1, cfg.M + 1):
        mb = rep.m_bar[k - 1]
        if k <= rep.k_bar:
            assert mb is None
        if mb is not None:
            assert 1 <= mb <= k


def test_volume_crossover_matches_k_bar(qam4):
    for eps in (0.3, 1e-2, 1e-4):
        for mm in (3, 6, 8):
            cfg = sl.SystemConfig(M=mm, N=mm, sigma2=0.04, constellation=qam4)
            rep = tree_pruning_report(cfg, eps)
            inside = np.flatnonzero(rep.v_box <= rep.v_sphere)
            k_from_volumes = int(inside[-1]) + 1 if inside.size else 0
            assert k_from_volumes == rep.k_bar


def test_zero_difference_visit_probability_ordering(qam4):
    # the all-zero difference node is entered at least as often by the
    # sphere decoder: [P(1,kinf)]^(k+L) <= P(k+L, k2)
    for (mm, nn) in [(4, 4), (3, 5)]:
        cfg = sl.SystemConfig(M=mm, N=nn, sigma2=0.1, constellation=qam4)
        for eps in (0.5, 1e-2, 1e-6):
            kinf = radius_linf(eps, nn, 1.0)
            k2 = radius_l2(eps, nn, 1.0)
            for k in range(1, mm + 1):
                lhs = reg_lower_gamma(1.0, kinf) ** (k + cfg.L)
                rhs = reg_lower_gamma(k + cfg.L, k2)
                assert lhs <= rhs + 1e-12


def test_asymptotic_visit_probability_converges(qam4):
    # exact visit probability over asymptote tends to 1 with SNR
    M, L, k = 4, 0, 3
    eps = 1e-2
    qs = [0, 2, 4, 8]  # one fixed difference prefix, norms per level
    denom = 1
    m_hat = 1
    snrs = np.array([30.0, 40.0, 50.0, 60.0])
    ratios_inf = []
    ratios_l2 = []
    for snr in snrs:
        s2 = sl.sigma2_from_snr_db(snr)
        kinf = radius_linf(eps, M, s2) / s2
        k2 = radius_l2(eps, M, s2) / s2
        C = math.sqrt(radius_linf(eps, M, s2))
        exact = 1.0
        for m in range(1, k + 1):
            st = PrefixState(q_prev=qs[m - 1], q_cur=qs[m], denominator=denom)
            exact *= component_cdf_linf(st, m, L, C, s2, M)
        approx = asymptotic_visit_probability(
            NormKind.LINF, k, L, m_hat, qs[k] / denom, kinf, 1.0 / s2, M
        )
        ratios_inf.append(exact / approx)
        exact2 = reg_lower_gamma(k + L, radius_l2(eps, M, s2) / (qs[k] / M + s2))
        approx2 = asymptotic_visit_probability(
            NormKind.L2, k, L, m_hat, qs[k] / denom, k2, 1.0 / s2, M
        )
        ratios_l2.append(exact2 / approx2)
    for ratios in (ratios_inf, ratios_l2):
        errs = np.abs(np.array(ratios) - 1.0)
        assert np.all(np.diff(errs) < 0)
        assert errs[-1] < 0.05


def test_asymptotic_l2_single_level_form():
    kappa2, rho, b2, M = 3.0, 100.0, 2.0, 4
    got = asymptotic_visit_probability(NormKind.L2, 1, 0, 1, b2, kappa2, rho, M)
    assert got == pytest.approx(kappa2 / (rho * b2 / M), rel=1e-12)


def test_asymptotic_comparison_condition():
    # box beats sphere asymptotically iff A(m_hat) <= rho_C^(k+L)/(k+L)!
    M, L = 6, 0
    eps = 1e-3
    s2 = 0.05
    kinf = radius_linf(eps, M, s2) / s2
    k2 = radius_l2(eps, M, s2) / s2
    rho_c = k2 / kinf
    rho = 1.0 / s2
    for k in range(1, M + 1):
        for m_hat in range(1, k + 1):
            pinf = asymptotic_visit_probability(NormKind.LINF, k, L, m_hat, 2.0,
                                                kinf, rho, M)
            pl2 = asymptotic_visit_probability(NormKind.L2, k, L, m_hat, 2.0,
                                               k2, rho, M)
            lhs = high_snr_visit_coefficient(m_hat, L, kinf)
            rhs = math.exp((k + L) * math.log(rho_c) - math.lgamma(k + L + 1))
            assert (pinf <= pl2) == (lhs <= rhs)


# --- pairwise error bounds ---------------------------------------------------


def test_pep_gap_bounds():
    for n in range(1, 17):
        b = pairwise_error_bounds(n, n, 2.0)
        assert b.beta <= 4.0 * (math.sqrt(n) + 1.0) ** 2 + 1e-9
        assert b.beta <= 16.0 * n + 1e-9
        expected_tilde = 4.0 * (math.sqrt(2 * n) + 1.0) ** 2 * math.exp(
            -(math.lgamma(2 * n + 1) - 2 * math.lgamma(n + 1) - math.log(2.0)) / n
        )
        assert b.beta_tilde == pytest.approx(expected_tilde, rel=1e-10)


def test_pep_curves_slope_and_ordering():
    n, m, b2 = 4, 4, 2.0
    b = pairwise_error_bounds(n, m, b2)
    rho_lo, rho_hi = 10.0 ** (40 / 10), 10.0 ** (60 / 10)
    for curve in (b.ub_inf, b.ub_ml, b.lb_ml):
        slope = (math.log10(curve(rho_hi)) - math.log10(curve(rho_lo))) / (
            math.log10(rho_hi) - math.log10(rho_lo)
        )
        assert slope == pytest.approx(-n, rel=0.02)
    rhos = np.logspace(0, 6, 40)
    assert np.all(b.lb_ml(rhos) <= b.ub_ml(rhos) + 1e-15)
    with pytest.raises(ValueError):
        pairwise_error_bounds(2, 2, 0.0)
