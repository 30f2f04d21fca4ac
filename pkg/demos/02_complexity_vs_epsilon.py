"""Closed-form total complexity as a function of the radius parameter eps.

For large eps the box decoder visits fewer nodes than the sphere decoder;
for small eps the ordering flips.  The squaring-free metric is reported as
a (lower, upper) interval since its general components admit only bounds.
"""

import numpy as np

import spherelab as sl
from spherelab.decoder import NormKind

qam = sl.make_constellation("4qam")
eps_grid = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6]

for mm in (4, 6, 8):
    cfg = sl.SystemConfig(M=mm, N=mm, sigma2=sl.sigma2_from_snr_db(15.0),
                          constellation=qam)
    print(f"\n{mm}x{mm}, 4-QAM, 15 dB")
    print(f"{'eps':>8} {'sphere':>10} {'box':>10} {'sq-free (lo..hi)':>20}")
    for eps in eps_grid:
        t2 = sl.expected_nodes(NormKind.L2, cfg, eps).total
        ti = sl.expected_nodes(NormKind.LINF, cfg, eps).total
        rt = sl.expected_nodes(NormKind.LTILDEINF, cfg, eps)
        marker = "<" if ti < t2 else ">"
        print(f"{eps:8.0e} {t2:10.3f} {ti:10.3f} "
              f"{rt.total:9.3f}..{rt.total_upper:<9.3f} box {marker} sphere")
