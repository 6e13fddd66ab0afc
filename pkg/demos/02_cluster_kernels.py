"""
Distance distribution of a daughter point
==========================================

A daughter sits at a random offset from its parent.  With the parent at
distance s from the origin, G(r | s) is the probability that the daughter
lands within r of the origin and g(r | s) its density.  Thomas and Matern
kernels have closed forms; any radial density can be handled numerically.
"""

import numpy as np

from ppcpcov import Matern, NumericRadial, Thomas

thomas = Thomas.from_variance(0.7)
matern = Matern.from_radius_squared(2.8)
print("both kernels have E|Y|^2 =", thomas.second_moment, matern.second_moment)

r = np.linspace(0, 5, 11)
s = 2.0
print("\n r     G_thomas(r|2)  G_matern(r|2)")
for ri, gt, gm in zip(r, thomas.G(r, s), matern.G(r, s)):
    print(f"{ri:4.1f}   {gt:.6f}       {gm:.6f}")

# the Matern density has compact support: nothing beyond r_d + s
print("\nMatern g beyond r_d + s:", matern.g(matern.rd + s + 0.01, s))

# a generic radial density reproduces the closed forms
sigma = thomas.sigma
numeric = NumericRadial(lambda u: np.exp(-u * u / (2 * sigma**2)) / (2 * np.pi * sigma**2))
grid = np.linspace(0.2, 6, 10)
rr, ss = np.meshgrid(grid, grid)
print("max |G_closed - G_numeric| on a 10x10 grid:",
      np.max(np.abs(thomas.G(rr, ss) - numeric.G(rr, ss))))

# the exchange symmetry s g(r|s) = r g(s|r)
print("max |s g(r|s) - r g(s|r)|:", np.max(np.abs(ss * matern.g(rr, ss) - rr * matern.g(ss, rr))))

# a density without a closed form: exponential radial profile
expo = NumericRadial(lambda u: np.exp(-u) / (2 * np.pi))
print("\nexponential kernel: E|Y|^2 =", expo.second_moment, " G(1|1) =", expo.G(1.0, 1.0))
