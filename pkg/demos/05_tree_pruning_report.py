"""Tree-pruning comparison quantities for a 6x6 system.

The radii ratio fixes the depth k_bar up to which the box prunes every
node harder than the sphere (in the high-SNR sense), the per-level range
m_bar of first-error levels pruned softer beyond that depth, and the
realization-wise guarantee depth.  Search-space volumes cross over at the
same k_bar.
"""

import spherelab as sl

qam = sl.make_constellation("4qam")
cfg = sl.SystemConfig(M=6, N=6, sigma2=sl.sigma2_from_snr_db(15.0),
                      constellation=qam)

for eps in (1e-2, 1e-5):
    rep = sl.tree_pruning_report(cfg, eps)
    print(f"\neps = {eps:g}: kappa_inf={rep.kappa_inf:.3f} "
          f"kappa2={rep.kappa2:.3f} rho_c={rep.rho_c:.3f}")
    print(f"  k_bar={rep.k_bar} (box prunes every node harder up to here), "
          f"k_bar_inst={rep.k_bar_inst}")
    print(f"  {'k':>2} {'A(first-error k)':>17} {'m_bar(k)':>9} "
          f"{'V sphere':>12} {'V box':>12}")
    for k in range(1, cfg.M + 1):
        mb = rep.m_bar[k - 1]
        print(f"  {k:2d} {rep.a_values[k-1]:17.5f} "
              f"{'-' if mb is None else mb:>9} {rep.v_sphere[k-1]:12.4e} "
              f"{rep.v_box[k-1]:12.4e}")
