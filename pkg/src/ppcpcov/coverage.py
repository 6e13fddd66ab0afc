"""Analytic downlink coverage probability for cluster-process networks.

The typical user at the origin is served by its nearest base station under
Rayleigh fading and power-law path loss ``r**-beta``.  Coverage is the
triple integral

    P(SIR > theta) = alpha * int_0^inf T(r, theta) M(r, theta) dr

with ``T`` and ``M`` integrals over the parent distance ``s`` of the factor
``C(r, s, theta)``, itself an integral over the daughter distance ``u``.

All three levels run on :func:`integrate_batch`, so a whole layer of the
nesting is evaluated in one vectorised sweep.  Rather than ``C`` we carry its
log-deficit

    D(r, s, theta) = -log C / alpha
                   = G(r|s) + int_r^inf w(u) g(u|s) du,
    w(u) = theta (r/u)^beta / (1 + theta (r/u)^beta),

which is positive and keeps full relative precision when ``C`` is close to 1
(the far parents that make the ``M`` integral converge slowly).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from .contact import ClusterModel, PoissonModel, void_exponent
from .quadrature import (
    QuadratureConfig,
    QuadratureError,
    TailBoundError,
    integrate_batch,
)

__all__ = [
    "PathLoss",
    "SirThreshold",
    "QuadratureConfig",
    "QuadratureError",
    "TailBoundError",
    "C_factor",
    "T_functional",
    "M_functional",
    "contact_density",
    "coverage_integral",
    "coverage_probability",
    "coverage_curve",
    "outer_radius",
    "ppp_baseline",
]

# the u-integrand is tiny for far parents, so the innermost level is
# controlled relatively only
_TINY = 1e-300


@dataclass(frozen=True)
class PathLoss:
    """Power-law attenuation ``l(r) = r**-beta`` with ``beta > 2``."""

    beta: float = 4.0

    def __post_init__(self):
        if not (np.isfinite(self.beta) and self.beta > 2):
            raise ValueError("beta must be > 2 for the interference integral to converge")

    def __call__(self, r):
        return np.asarray(r, dtype=float) ** -self.beta

    def ratio(self, u, r):
        """``l(u) / l(r) = (r / u)**beta``."""
        return (np.asarray(r, dtype=float) / u) ** self.beta


@dataclass(frozen=True)
class SirThreshold:
    """Linear SIR threshold; build from decibels with :meth:`from_db`."""

    theta: float

    def __post_init__(self):
        if not (np.isfinite(self.theta) and self.theta > 0):
            raise ValueError("theta must be positive and finite")

    @classmethod
    def from_db(cls, db: float) -> "SirThreshold":
        return cls(10.0 ** (db / 10.0))

    @property
    def db(self) -> float:
        return 10.0 * np.log10(self.theta)

    def __float__(self):
        return float(self.theta)


def _theta(theta) -> float:
    t = float(theta)
    if not (np.isfinite(t) and t >= 0):
        raise ValueError("theta must be non-negative and finite")
    return t


def _cluster(model):
    if not isinstance(model, ClusterModel):
        raise TypeError("expected a ClusterModel")
    return model


# --------------------------------------------------------------------------
# nested levels, all vectorised over flat arrays

def _deficit(model, pl, r, s, theta, quad):
    """``D(r, s, theta)`` for flat arrays ``r`` and ``s`` of equal length."""
    k = model.kernel
    D = k._G(r, s)
    if theta == 0 or r.size == 0:
        return D
    lo, hi = k.support(s)
    lo = np.maximum(lo, r)
    beta = pl.beta
    rtol = quad.level(3)[0]

    def f(u, i):
        x = theta * (r[i] / u) ** beta
        return x / (1 + x) * k._g(u, s[i])

    res = integrate_batch(f, lo, hi, rtol=rtol, atol=_TINY,
                          breakpoints=[k.kinks(s), s], max_depth=quad.max_subdivisions, smooth_ends=True)
    return D + res.check("inner-u", rtol=rtol, atol=_TINY)


def _T(model, pl, r, theta, quad):
    k = model.kernel
    lo, hi = k.support(r)
    rtol, atol = quad.level(2)

    def f(s, i):
        rr = np.broadcast_to(r[i], s.shape).ravel()
        ss = s.ravel()
        D = _deficit(model, pl, rr, ss, theta, quad)
        return (k._g(rr, ss) * np.exp(-model.alpha * D) * ss).reshape(s.shape)

    res = integrate_batch(f, lo, hi, rtol=rtol, atol=atol,
                          breakpoints=[k.kinks(r), r], max_depth=quad.max_subdivisions, smooth_ends=True)
    return 2 * np.pi * model.lambda_p * res.check("middle-T", rtol=rtol, atol=atol)


def _tail_envelope(model, pl, r, theta, S):
    """Bound on ``2 pi lambda_p int_S^inf [1 - C] s ds`` for ``S > r + reach``.

    ``1 - C <= alpha D`` and, with every daughter of a parent at ``s`` lying
    beyond ``s - reach``, ``D <= theta (r / (s - reach))**beta``.
    """
    beta = pl.beta
    delta = model.kernel.reach
    v = S - delta
    integral = v ** (2 - beta) / (beta - 2) + delta * v ** (1 - beta) / (beta - 1)
    return 2 * np.pi * model.lambda_p * model.alpha * theta * r**beta * integral


def _tail_cut(model, pl, r, theta, quad, start):
    """Truncation radius per ``r`` whose envelope tail is below the cutoff."""
    cut = quad.tail_mass_cutoff
    S = np.maximum(start, r + model.kernel.reach) * 2.0
    for _ in range(200):
        over = _tail_envelope(model, pl, r, theta, S) > cut
        if not np.any(over):
            return S
        S = np.where(over, 2 * S, S)
    raise TailBoundError("tail-M: envelope bound did not fall below tail_mass_cutoff",
                         level="tail-M")


def _M_exponent(model, pl, r, theta, quad):
    k = model.kernel
    rtol, atol = quad.level(2)
    alpha = model.alpha

    def near(s, i):
        rr = np.broadcast_to(r[i], s.shape).ravel()
        ss = s.ravel()
        D = _deficit(model, pl, rr, ss, theta, quad)
        return (-np.expm1(-alpha * D) * ss).reshape(s.shape)

    S1 = r + k.reach
    res = integrate_batch(near, np.zeros_like(r), S1, rtol=rtol, atol=atol,
                          breakpoints=[k.kinks(r), r], max_depth=quad.max_subdivisions, smooth_ends=True)
    total = res.check("middle-M", rtol=rtol, atol=atol)
    if theta == 0:
        return 2 * np.pi * model.lambda_p * total

    # far parents: s = S1 + c t / (1 - t) up to the certified cut
    c = r + 3 * k.spread
    S_max = _tail_cut(model, pl, r, theta, quad, S1)
    t_max = (S_max - S1) / (S_max - S1 + c)

    def far(t, i):
        cc = c[i]
        s = S1[i] + cc * t / (1 - t)
        rr = np.broadcast_to(r[i], s.shape).ravel()
        D = _deficit(model, pl, rr, s.ravel(), theta, quad).reshape(s.shape)
        return -np.expm1(-alpha * D) * s * cc / (1 - t) ** 2

    res = integrate_batch(far, np.zeros_like(r), t_max, rtol=rtol, atol=atol,
                          max_depth=quad.max_subdivisions)
    total = total + res.check("middle-M-tail", rtol=rtol, atol=atol)
    return 2 * np.pi * model.lambda_p * total


def _flat_r(r):
    r = np.asarray(r, dtype=float)
    if np.any(np.isnan(r)) or np.any(r <= 0):
        raise ValueError("r must be positive")
    return r, r.ravel()


def _out(v, shape):
    v = np.asarray(v).reshape(shape)
    return float(v) if v.ndim == 0 else v


# --------------------------------------------------------------------------
# public functionals

def C_factor(model: ClusterModel, pl: PathLoss, r, s, theta,
             quad: Optional[QuadratureConfig] = None):
    """``C(r, s, theta)``: the probability-like factor contributed by one parent at ``s``.

    ``exp(-alpha [1 - int_r^inf (1 + theta l(u)/l(r))^-1 g(u|s) du])``.
    """
    model = _cluster(model)
    quad = quad or QuadratureConfig()
    theta = _theta(theta)
    r, s = np.broadcast_arrays(np.asarray(r, float), np.asarray(s, float))
    if np.any(r <= 0) or np.any(s < 0):
        raise ValueError("need r > 0 and s >= 0")
    D = _deficit(model, pl, r.ravel(), s.ravel(), theta, quad)
    return _out(np.exp(-model.alpha * D), r.shape)


def T_functional(model: ClusterModel, pl: PathLoss, r, theta,
                 quad: Optional[QuadratureConfig] = None):
    """``T(r, theta) = 2 pi lambda_p int_0^inf g(r|s) C(r, s, theta) s ds``."""
    model = _cluster(model)
    quad = quad or QuadratureConfig()
    r, flat = _flat_r(r)
    return _out(_T(model, pl, flat, _theta(theta), quad), r.shape)


def M_functional(model: ClusterModel, pl: PathLoss, r, theta,
                 quad: Optional[QuadratureConfig] = None):
    """``M(r, theta) = exp(-2 pi lambda_p int_0^inf [1 - C(r, s, theta)] s ds)``.

    The slowly decaying far-parent tail is integrated after a rational change
    of variables and cut where the analytic envelope certifies the discarded
    mass is below ``quad.tail_mass_cutoff``.
    """
    model = _cluster(model)
    quad = quad or QuadratureConfig()
    r, flat = _flat_r(r)
    return _out(np.exp(-_M_exponent(model, pl, flat, _theta(theta), quad)), r.shape)


def contact_density(model: ClusterModel, r, quad: Optional[QuadratureConfig] = None):
    """Contact-distance density ``alpha T(r, 0) M(r, 0)``."""
    model = _cluster(model)
    quad = quad or QuadratureConfig()
    r, flat = _flat_r(r)
    pl = PathLoss()
    val = model.alpha * _T(model, pl, flat, 0.0, quad) * np.exp(-_M_exponent(model, pl, flat, 0.0, quad))
    return _out(val, r.shape)


def outer_radius(model, quad: Optional[QuadratureConfig] = None) -> float:
    """Smallest doubling radius with contact-distance tail below ``tail_mass_cutoff``."""
    quad = quad or QuadratureConfig()
    if isinstance(model, PoissonModel):
        return float(np.sqrt(-np.log(quad.tail_mass_cutoff) / (np.pi * model.intensity)))
    R = 1.0 / np.sqrt(model.intensity)
    for _ in range(100):
        if void_exponent(model, R, quad) > -np.log(quad.tail_mass_cutoff):
            return float(R)
        R *= 2
    raise TailBoundError("outer-r: contact-distance tail never fell below cutoff", level="outer-r")


def coverage_integral(model: ClusterModel, pl: PathLoss, theta,
                      quad: Optional[QuadratureConfig] = None) -> float:
    """``alpha int_0^R_max T(r, theta) M(r, theta) dr`` without any special-casing.

    At ``theta = 0`` this is the total mass of the contact-distance density
    and should equal 1.
    """
    model = _cluster(model)
    quad = quad or QuadratureConfig()
    theta = _theta(theta)
    R = outer_radius(model, quad)
    rtol, atol = quad.level(0)

    def f(r, i):
        rr = r.ravel()
        T = _T(model, pl, rr, theta, quad)
        M = np.exp(-_M_exponent(model, pl, rr, theta, quad))
        return (model.alpha * T * M).reshape(r.shape)

    res = integrate_batch(f, [0.0], [R], rtol=rtol, atol=atol, max_depth=quad.max_subdivisions)
    return float(res.check("outer-r", rtol=rtol, atol=atol)[0])


def coverage_probability(model, pl: PathLoss, theta,
                         quad: Optional[QuadratureConfig] = None) -> float:
    """Downlink coverage probability ``P(SIR > theta)`` of the typical user.

    ``theta`` is linear (a float or :class:`SirThreshold`); ``theta = 0``
    returns 1 exactly.  A :class:`PoissonModel` is answered with
    :func:`ppp_baseline`.

    Raises
    ------
    QuadratureError
        When a nested integral misses its tolerance; ``err.level`` names
        the level (``inner-u``, ``middle-T``, ``middle-M``, ``outer-r``...).
    """
    theta = _theta(theta)
    if theta == 0:
        return 1.0
    if isinstance(model, PoissonModel):
        return ppp_baseline(theta, pl.beta)
    return float(np.clip(coverage_integral(model, pl, theta, quad), 0.0, 1.0))


def coverage_curve(model, pl: PathLoss, thetas, quad: Optional[QuadratureConfig] = None):
    """:func:`coverage_probability` over a sequence of thresholds, in order."""
    return np.array([coverage_probability(model, pl, t, quad) for t in thetas])


def ppp_baseline(theta, beta: float = 4.0) -> float:
    """Coverage of a homogeneous PPP network (nearest BS, Rayleigh, no noise).

    ``1 / (1 + rho)`` with ``rho = theta^(2/beta) int_{theta^(-2/beta)}^inf
    du / (1 + u^(beta/2))``; independent of the density.
    """
    theta = _theta(theta)
    if not beta > 2:
        raise ValueError("beta must be > 2")
    if theta == 0:
        return 1.0
    a = theta ** (2.0 / beta)
    c = 1.0 / a
    h = beta / 2
    # [c, inf) is split at 1 and the unbounded part mapped by t = 1/u, which
    # gives int_0^min(1, 1/c) t^(h-2) / (1 + t^h) dt
    pieces = [(lambda t: t ** (h - 2) / (1.0 + t**h), 0.0, min(1.0, a))]
    if c < 1:
        pieces.append((lambda u: 1.0 / (1.0 + u**h), c, 1.0))
    val = err = 0.0
    for f, lo, hi in pieces:
        v, e = integrate.quad(f, lo, hi, epsabs=1e-14, epsrel=1e-12, limit=200)
        val, err = val + v, err + e
    if err > 1e-9 * max(1.0, val):
        raise QuadratureError("ppp_baseline: integral did not converge", level="ppp")
    return 1.0 / (1.0 + a * val)
