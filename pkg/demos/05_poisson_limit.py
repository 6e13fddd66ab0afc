"""
Wide clusters look like a Poisson network
==========================================

When the daughters spread far beyond a typical cell, a cluster network
behaves like a homogeneous Poisson network of the same density, whose
coverage with Rayleigh fading and r^-4 path loss has a closed form.
"""

import numpy as np

from ppcpcov import ClusterModel, PathLoss, Thomas, coverage_probability, ppp_baseline

pl = PathLoss(4.0)
print("closed form at 0 dB:", ppp_baseline(1.0), "=", 1 / (1 + np.pi / 4))

print("\nsigma^2   -10 dB    0 dB    10 dB")
for s2 in (0.3, 3.0, 50.0):
    model = ClusterModel(0.1 / np.pi, 10.0, Thomas.from_variance(s2))
    vals = [coverage_probability(model, pl, 10 ** (d / 10)) for d in (-10, 0, 10)]
    print(f"{s2:7.1f}  " + "  ".join(f"{v:.4f}" for v in vals))
print("    PPP  " + "  ".join(f"{ppp_baseline(10 ** (d / 10)):.4f}" for d in (-10, 0, 10)))
