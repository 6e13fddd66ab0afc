"""Batched adaptive Gauss-Kronrod (G10/K21) quadrature.

Many independent one-dimensional integrals over finite intervals are
integrated together.  Each refinement round evaluates the integrand once on
every still-active subinterval, so an integrand that is cheap per element but
expensive per Python call (the nested integrals of the coverage formula) is
dominated by vectorised numpy work rather than interpreter overhead.

Semi-infinite ranges are handled by the caller through a change of variables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "QuadratureConfig",
    "QuadratureError",
    "TailBoundError",
    "BatchResult",
    "integrate_batch",
    "gauss_legendre",
]

# Kronrod abscissae on [-1, 1]; the Gauss nodes are the odd positions.
_XK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
])
_XK = np.concatenate([_XK, -_XK[-2::-1]])

_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])
_WG = np.concatenate([_WG, _WG[::-1]])

_WK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WK = np.concatenate([_WK, _WK[-2::-1]])

_EPS = np.finfo(float).eps


class QuadratureError(ArithmeticError):
    """An integral did not reach its requested tolerance.

    ``level`` names the nesting level that failed (for example ``"inner-u"``)
    so that callers can report where a nested evaluation broke down.
    """

    def __init__(self, message: str, level: str = "", error: float = float("nan")):
        super().__init__(message)
        self.level = level
        self.error = error


class TailBoundError(QuadratureError):
    """The analytic envelope could not certify a truncated semi-infinite tail."""


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances for the nested coverage integrals.

    ``rel_tol``/``abs_tol`` apply to the outermost integral; each nested
    level gets a budget ten times tighter.  ``tail_mass_cutoff`` bounds the
    mass discarded when a semi-infinite range is truncated.
    """

    rel_tol: float = 1e-6
    abs_tol: float = 1e-9
    tail_mass_cutoff: float = 1e-8
    max_subdivisions: int = 40

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "tail_mass_cutoff", "max_subdivisions"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive")
        if self.rel_tol >= 1:
            raise ValueError("rel_tol must be < 1")

    def level(self, depth: int):
        """``(rtol, atol)`` for nesting depth ``depth`` (0 = outermost)."""
        scale = 0.1**depth
        return self.rel_tol * scale, self.abs_tol * scale


@dataclass(frozen=True)
class BatchResult:
    value: np.ndarray
    error: np.ndarray
    converged: np.ndarray

    def check(self, level: str, slack: float = 10.0, rtol: float = 0.0, atol: float = 0.0):
        """Raise :class:`QuadratureError` if any problem missed ``slack`` x its tolerance."""
        bad = ~self.converged
        if np.any(bad):
            allowed = slack * np.maximum(atol, rtol * np.abs(self.value))
            worst = self.error - allowed
            if np.any(worst[bad] > 0):
                i = np.flatnonzero(bad)[np.argmax(worst[bad])]
                raise QuadratureError(
                    f"{level}: integral {i} not converged "
                    f"(value {self.value[i]:.6g}, error estimate {self.error[i]:.3g})",
                    level=level,
                    error=float(self.error[i]),
                )
        return self.value


def _initial_intervals(a, b, breakpoints):
    n = a.size
    edges = [a, b]
    if breakpoints is not None:
        for bp in breakpoints:
            bp = np.broadcast_to(np.asarray(bp, dtype=float), (n,))
            inside = np.isfinite(bp) & (bp > a) & (bp < b)
            edges.append(np.where(inside, bp, a))
    e = np.sort(np.stack(edges, axis=1), axis=1)
    lo = e[:, :-1].ravel()
    hi = e[:, 1:].ravel()
    owner = np.repeat(np.arange(n), e.shape[1] - 1)
    keep = hi > lo
    return lo[keep], hi[keep], owner[keep]


def integrate_batch(f, a, b, *, rtol=1e-8, atol=1e-12, breakpoints=None, max_depth=40,
                    max_intervals=200_000, chunk=2048, smooth_ends=False):
    """Integrate ``f`` over ``[a[i], b[i]]`` for every ``i`` at once.

    Parameters
    ----------
    f : callable
        ``f(x, idx)`` with ``x`` of shape ``(m, 21)`` and ``idx`` of shape
        ``(m, 1)`` giving the problem index of each row; returns values with
        the shape of ``x``.
    a, b : array_like
        Finite integration limits, broadcast together.  ``b <= a`` yields 0.
    rtol, atol : float
        Per-problem tolerance ``max(atol, rtol * |I|)``; a subinterval is
        accepted when its error estimate is below its length-proportional share.
    breakpoints : sequence of array_like, optional
        Interior points (per problem, NaN for none) where the integrand has a
        kink or jump.  They become initial subdivision points.
    smooth_ends : bool
        Map every piece between breakpoints through
        ``x = lo + (hi - lo) sin^2(pi t / 2)``, which removes square-root
        type endpoint singularities (support edges of the Matern kernel).
    chunk : int
        Problems are processed ``chunk`` at a time; since every problem is
        refined independently the result does not depend on it.

    Returns
    -------
    BatchResult
    """
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    shape = a.shape
    a = a.ravel()
    b = b.ravel()
    n = a.size
    value = np.zeros(n)
    error = np.zeros(n)
    converged = np.ones(n, dtype=bool)
    if n == 0:
        return BatchResult(value.reshape(shape), error.reshape(shape), converged.reshape(shape))
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("integration limits must be finite")

    if smooth_ends:
        lo, hi, owner = _initial_intervals(a, b, breakpoints)
        width = hi - lo

        def h(t, j):
            x = lo[j] + width[j] * np.sin(0.5 * np.pi * t) ** 2
            return f(x, owner[j]) * (0.5 * np.pi * width[j] * np.sin(np.pi * t))

        sub = integrate_batch(h, np.zeros_like(lo), np.ones_like(lo), rtol=rtol, atol=atol,
                              max_depth=max_depth, max_intervals=max_intervals, chunk=chunk)
        value = np.bincount(owner, sub.value, minlength=n)
        error = np.bincount(owner, sub.error, minlength=n)
        converged = np.bincount(owner, ~sub.converged, minlength=n) == 0
        return BatchResult(value.reshape(shape), error.reshape(shape), converged.reshape(shape))
    if breakpoints is not None:
        breakpoints = [np.broadcast_to(np.asarray(bp, dtype=float), shape).ravel() for bp in breakpoints]
    if n > chunk:
        for k in range(0, n, chunk):
            sl = slice(k, min(k + chunk, n))
            sub = integrate_batch(
                lambda x, i, k=k: f(x, i + k), a[sl], b[sl], rtol=rtol, atol=atol,
                breakpoints=None if breakpoints is None else [bp[sl] for bp in breakpoints],
                max_depth=max_depth, max_intervals=max_intervals, chunk=chunk)
            value[sl], error[sl], converged[sl] = sub.value, sub.error, sub.converged
        return BatchResult(value.reshape(shape), error.reshape(shape), converged.reshape(shape))

    span = np.where(b > a, b - a, 1.0)
    lo, hi, owner = _initial_intervals(a, b, breakpoints)

    for depth in range(max_depth + 1):
        if lo.size == 0:
            break
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        x = mid[:, None] + half[:, None] * _XK
        fx = np.asarray(f(x, owner[:, None]), dtype=float)
        kron = half * (fx @ _WK)
        gauss = half * (fx[:, 1::2] @ _WG)
        # QUADPACK-style error scaling
        mean = kron / np.where(half != 0, 2 * half, 1.0)
        resasc = np.abs(half) * (np.abs(fx - mean[:, None]) @ _WK)
        resabs = np.abs(half) * (np.abs(fx) @ _WK)
        err = np.abs(kron - gauss)
        with np.errstate(divide="ignore", invalid="ignore"):
            scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
        err = np.where((resasc != 0) & (err != 0), scaled, err)
        floor = 50 * _EPS * resabs
        err = np.maximum(err, floor)

        total = value + np.bincount(owner, kron, minlength=n)
        tol = np.maximum(atol, rtol * np.abs(total))
        # retire intervals within half their length share; a problem whose
        # total (retired + active) error fits its tolerance is finished
        share = 0.5 * tol[owner] * (hi - lo) / span[owner]
        done = (error + np.bincount(owner, err, minlength=n)) <= tol
        # an interval whose estimate sits at the roundoff floor cannot improve
        accept = done[owner] | (err <= share) | (err <= 2 * floor)
        if depth == max_depth or 2 * np.count_nonzero(~accept) > max_intervals:
            missed = ~accept
            converged[np.unique(owner[missed])] = False
            accept[:] = True
        value += np.bincount(owner[accept], kron[accept], minlength=n)
        error += np.bincount(owner[accept], err[accept], minlength=n)
        rest = ~accept
        lo, hi, owner, mid = lo[rest], hi[rest], owner[rest], mid[rest]
        lo = np.concatenate([lo, mid])
        hi = np.concatenate([mid, hi])
        owner = np.concatenate([owner, owner])

    return BatchResult(value.reshape(shape), error.reshape(shape), converged.reshape(shape))


def gauss_legendre(order: int, a: float = -1.0, b: float = 1.0):
    """Gauss-Legendre nodes and weights mapped to ``[a, b]``."""
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w
