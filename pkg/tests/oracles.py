"""Independent reference computations used by the tests.

Nothing here calls the adaptive integrator of the package: special functions
come from mpmath/scipy.stats, geometry from closed forms, and integrals from
fixed dense grids with Simpson's rule.  Grids are split at the kernel kinks
and each piece is mapped by ``a + (b - a) sin^2(pi t / 2)`` so that square-root
endpoint behaviour (Matern arccos terms) does not spoil the convergence rate.
"""

import mpmath
import numpy as np
from scipy import integrate, stats


def i0_scaled_mp(x, dps=40):
    with mpmath.workdps(dps):
        return float(mpmath.besseli(0, x) * mpmath.exp(-x))


def marcum_q1_ncx2(a, b):
    # Q1(a, b) is the survival function of a noncentral chi-square(2, a^2) at b^2
    return stats.ncx2.sf(np.square(b), 2, np.square(a))


def marcum_q1_mp(a, b, dps=30):
    with mpmath.workdps(dps):
        f = lambda x: x * mpmath.exp(-(x * x + a * a) / 2) * mpmath.besseli(0, a * x)
        return float(mpmath.quad(f, [b, a + 2, a + 20, mpmath.inf]))


def lens_area(r, s, R):
    """Area of the intersection of disks of radii r (at 0) and R (at distance s)."""
    if r == 0 or R == 0:
        return 0.0
    if s >= r + R:
        return 0.0
    if s <= abs(R - r):
        return np.pi * min(r, R) ** 2
    a = r * r * np.arccos((s * s + r * r - R * R) / (2 * s * r))
    b = R * R * np.arccos((s * s + R * R - r * r) / (2 * s * R))
    c = 0.5 * np.sqrt((-s + r + R) * (s + r - R) * (s - r + R) * (s + r + R))
    return a + b - c


def matern_G(r, s, rd):
    return lens_area(r, s, rd) / (np.pi * rd * rd)


def _kinks(kernel, s):
    rd = getattr(kernel, "rd", None)
    return [] if rd is None else [abs(rd - s), rd + s]


def mapped_simpson(f, a, b, points=(), n=801):
    """Fixed-grid Simpson integral of vectorised ``f`` over ``[a, b]``."""
    pts = sorted(p for p in set(points) if a < p < b)
    edges = [a, *pts, b]
    t = np.linspace(0.0, 1.0, n)
    w = np.sin(0.5 * np.pi * t) ** 2
    dw = 0.5 * np.pi * np.sin(np.pi * t)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi > lo:
            total += integrate.simpson(f(lo + (hi - lo) * w) * (hi - lo) * dw, x=t)
    return total


def deficit_grid(kernel, r, s, theta, beta, n=801):
    """``1 - int_r^inf (1 + theta (r/u)^beta)^-1 g(u|s) du`` on a dense grid."""
    lo, hi = max(r, s - kernel.reach), s + kernel.reach
    if hi <= r:
        return 1.0
    f = lambda u: kernel.g(u, np.full_like(u, s)) / (1 + theta * (r / u) ** beta)
    return 1.0 - mapped_simpson(f, lo, hi, _kinks(kernel, s), n)


def C_grid(model, r, s, theta, beta, n=4001):
    return np.exp(-model.alpha * deficit_grid(model.kernel, r, s, theta, beta, n))


def T_grid(model, r, theta, beta, ns=801, nu=801):
    k = model.kernel

    def f(s):
        C = np.array([C_grid(model, r, si, theta, beta, nu) for si in s])
        return k.g(np.full_like(s, r), s) * C * s

    return 2 * np.pi * model.lambda_p * mapped_simpson(f, max(0.0, r - k.reach), r + k.reach,
                                                       _kinks(k, r), ns)


def M_grid(model, r, theta, beta, s_max=400.0, ns=401, nu=801):
    """Brute-force M with piecewise s grids and an analytic far tail."""
    k = model.kernel

    def f(s):
        return np.array([-np.expm1(-model.alpha * deficit_grid(k, r, si, theta, beta, nu))
                         for si in s]) * s

    near = r + k.reach
    pts = _kinks(k, r) + [near, 2 * near, 4 * near, 10 * near, 40 * near]
    body = mapped_simpson(f, 0.0, s_max, pts, ns)
    # beyond s_max: 1 - C ~ alpha theta r^beta s^-beta
    tail = model.alpha * theta * r**beta * s_max ** (2 - beta) / (beta - 2)
    return np.exp(-2 * np.pi * model.lambda_p * (body + tail))


def marcum_p1_series(a, b, dps=60):
    """``1 - Q1(a, b)`` from the Neumann series in ``(b/a)^k I_k(ab)``, valid for b < a."""
    with mpmath.workdps(dps):
        a, b = mpmath.mpf(a), mpmath.mpf(b)
        s = mpmath.nsum(lambda k: (b / a) ** k * mpmath.besseli(k, a * b), [1, mpmath.inf])
        return float(mpmath.exp(-(a * a + b * b) / 2) * s)
