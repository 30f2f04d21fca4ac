"""Per-level expected node counts, analytic vs simulated, 6x6 at 15 dB.

Close to the root the box decoder prunes harder than the sphere decoder;
near the leaves the ordering reverses.  The squaring-free bounds bracket
its empirical means.
"""

import numpy as np

import spherelab as sl
from spherelab.decoder import NormKind
from spherelab.montecarlo import TrialPlan, run_node_counts

qam = sl.make_constellation("4qam")
cfg = sl.SystemConfig(M=6, N=6, sigma2=sl.sigma2_from_snr_db(15.0),
                      constellation=qam)

for eps in (1e-2, 1e-5):
    rep2 = sl.expected_nodes(NormKind.L2, cfg, eps)
    repi = sl.expected_nodes(NormKind.LINF, cfg, eps)
    rept = sl.expected_nodes(NormKind.LTILDEINF, cfg, eps)
    plan = TrialPlan(cfg=cfg, norms=(NormKind.L2, NormKind.LINF,
                                     NormKind.LTILDEINF),
                     trials=4000, seed=3, eps=eps, block_size=512)
    study = run_node_counts(plan)
    print(f"\neps = {eps:g}  (simulated: 4000 trials; +- is a 95% half-width)")
    print(f"{'k':>2} {'sphere ana':>11} {'sphere sim':>14} {'box ana':>9} "
          f"{'box sim':>14} {'sq-free lo..hi':>16} {'sq-free sim':>14}")
    for k in range(cfg.M):
        e2 = study.per_norm[NormKind.L2].per_level[k]
        ei = study.per_norm[NormKind.LINF].per_level[k]
        et = study.per_norm[NormKind.LTILDEINF].per_level[k]
        print(f"{k+1:2d} {rep2.per_level[k]:11.3f} "
              f"{e2.mean:8.3f}+-{e2.half_width:5.3f} {repi.per_level[k]:9.3f} "
              f"{ei.mean:8.3f}+-{ei.half_width:5.3f} "
              f"{rept.per_level[k]:7.3f}..{rept.per_level_upper[k]:<7.3f} "
              f"{et.mean:8.3f}+-{et.half_width:5.3f}")
    print(f"realization-wise pruning violations up to depth "
          f"{study.pruning_depth}: {study.pruning_violations}")
