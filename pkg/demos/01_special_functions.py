"""
Scaled Bessel, Marcum Q and the Rice density
=============================================

The Thomas kernel needs Q1(a, b) and its b-derivative for arguments that can
be in the thousands.  Everything here is computed with the scaled Bessel
function e^-x I0(x), so nothing overflows.
"""

import numpy as np
from scipy import stats

from ppcpcov import bessel_i0_scaled, marcum_q1, rice_pdf
from ppcpcov.specfun import marcum_p1

# e^-x I0(x) falls off like 1/sqrt(2 pi x)
x = np.array([0.0, 1.0, 10.0, 1e3, 1e6])
print("x        i0e(x)            1/sqrt(2 pi x)")
for xi, v in zip(x, bessel_i0_scaled(x)):
    ref = 1 / np.sqrt(2 * np.pi * xi) if xi else 1.0
    print(f"{xi:<8g} {v:.15f}  {ref:.15f}")

# Q1(a, b) is the upper tail of a Rice(a) variable, i.e. a noncentral
# chi-square with 2 degrees of freedom evaluated at b^2
a, b = 1.0, 2.0
print("\nQ1(1, 2) =", marcum_q1(a, b), " ncx2 check:", stats.ncx2.sf(b * b, 2, a * a))

# the density is minus the b-derivative
h = 1e-5
fd = -(marcum_q1(5.0, 5.0 + h) - marcum_q1(5.0, 5.0 - h)) / (2 * h)
print("rice_pdf(5, 5) =", rice_pdf(5.0, 5.0), " finite difference:", fd)

# deep tails stay meaningful in relative terms
print("\n1 - Q1(30, 10) =", marcum_p1(30.0, 10.0))
print("Q1(1, 20)      =", marcum_q1(1.0, 20.0))

# and very large arguments are harmless
print("Q1(1e6, 1e6) =", marcum_q1(1e6, 1e6), " rice_pdf(1e6, 1e6) =", rice_pdf(1e6, 1e6))
