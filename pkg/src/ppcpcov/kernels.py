"""Daughter kernels: radial offset densities and the distance laws they induce.

For a daughter whose parent sits at distance ``s`` from the origin,
``G(r, s)`` is the probability that the daughter lies within distance ``r`` of
the origin and ``g(r, s) = dG/dr`` is its density.  Both are symmetric in the
sense ``s * g(r, s) == r * g(s, r)``.

Every method broadcasts over numpy arrays.  The public methods validate their
arguments; the underscore variants skip validation and are what the nested
coverage integrals call.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .quadrature import gauss_legendre, integrate_batch
from .specfun import HALF_WIDTH, _marcum_pair, _rice

__all__ = ["DaughterKernel", "Thomas", "Matern", "NumericRadial"]

_KTOL = 1e-13
_PHI_ORDER = 64
_GL_X, _GL_W = gauss_legendre(_PHI_ORDER, 0.0, 1.0)


def _nonneg(name, *args):
    out = []
    for v in args:
        v = np.asarray(v, dtype=float)
        if np.any(np.isnan(v)) or np.any(v < 0):
            raise ValueError(f"{name}: arguments must be non-negative")
        out.append(v)
    return out


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def _half_angle(u, s, R):
    """Angle ``phi`` in ``[0, pi]`` with ``|u e^{i phi} - s| = R``, 0 if ``u s == 0``."""
    den = 4 * u * s
    with np.errstate(divide="ignore", invalid="ignore"):
        x = (R - u + s) * (R + u - s) / den
    return np.where(den > 0, 2 * np.arcsin(np.sqrt(np.clip(x, 0.0, 1.0))), 0.0)


class DaughterKernel:
    """Base class for radially symmetric daughter densities ``f_d``.

    Subclasses define ``_fd``, ``_G``, ``_g``, ``reach`` (radius beyond which
    the offset density carries negligible mass) and ``sample_offsets``.
    """

    #: True when ``f_d`` vanishes exactly beyond ``reach``
    bounded: bool = False

    def fd(self, s):
        (s,) = _nonneg("fd", s)
        return _out(self._fd(s))

    def G(self, r, s):
        r, s = _nonneg("G", r, s)
        return _out(self._G(r, s))

    def g(self, r, s):
        r, s = _nonneg("g", r, s)
        return _out(self._g(r, s))

    @property
    def spread(self) -> float:
        """Characteristic offset length (sigma or r_d)."""
        raise NotImplementedError

    @property
    def reach(self) -> float:
        raise NotImplementedError

    @property
    def second_moment(self) -> float:
        """``E|Y|^2`` of a daughter offset."""
        raise NotImplementedError

    def support(self, s):
        """Interval ``[lo, hi]`` outside which ``g(., s)`` is negligible or zero."""
        s = np.asarray(s, dtype=float)
        return np.maximum(s - self.reach, 0.0), s + self.reach

    def kinks(self, s):
        """Points where ``g(., s)`` is not smooth (NaN if none)."""
        s = np.asarray(s, dtype=float)
        return np.full(s.shape, np.nan)

    def sample_offsets(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class Thomas(DaughterKernel):
    """Gaussian offsets with covariance ``sigma**2 * I``."""

    sigma: float

    def __post_init__(self):
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError("sigma must be positive")

    @classmethod
    def from_variance(cls, sigma2: float) -> "Thomas":
        return cls(float(np.sqrt(sigma2)))

    @property
    def spread(self):
        return self.sigma

    @property
    def reach(self):
        return HALF_WIDTH * self.sigma

    @property
    def second_moment(self):
        return 2 * self.sigma**2

    def _fd(self, s):
        sig2 = self.sigma**2
        return np.exp(-0.5 * s * s / sig2) / (2 * np.pi * sig2)

    def _G(self, r, s):
        _, p = _marcum_pair(s / self.sigma, r / self.sigma)
        return p

    def _g(self, r, s):
        return _rice(s / self.sigma, r / self.sigma) / self.sigma

    def sample_offsets(self, rng, n):
        return self.sigma * rng.standard_normal((n, 2))


@dataclass(frozen=True)
class Matern(DaughterKernel):
    """Offsets uniform on the disk of radius ``rd``."""

    rd: float
    bounded = True

    def __post_init__(self):
        if not (np.isfinite(self.rd) and self.rd > 0):
            raise ValueError("rd must be positive")

    @classmethod
    def from_radius_squared(cls, rd2: float) -> "Matern":
        return cls(float(np.sqrt(rd2)))

    @property
    def spread(self):
        return self.rd

    @property
    def reach(self):
        return self.rd

    @property
    def second_moment(self):
        return 0.5 * self.rd**2

    def kinks(self, s):
        return np.abs(self.rd - np.asarray(s, dtype=float))

    def _fd(self, s):
        return np.where(s <= self.rd, 1.0 / (np.pi * self.rd**2), 0.0)

    def _angle(self, u, s):
        # arccos((u^2 + s^2 - rd^2) / (2 u s)) clamped to [0, pi], written as
        # 2 arcsin(sqrt((1 - c) / 2)) to stay accurate for far parents; 0 where u*s == 0
        return _half_angle(u, s, self.rd)

    def _G(self, r, s):
        r, s = np.broadcast_arrays(r, s)
        shape = r.shape
        r = r.ravel()
        s = s.ravel()
        rd = self.rd
        inner = np.minimum(r, np.maximum(rd - s, 0.0)) ** 2
        lo = np.minimum(r, np.abs(rd - s))
        hi = np.minimum(r, rd + s)

        def f(u, i):
            return u * self._angle(u, s[i])

        res = integrate_batch(f, lo, hi, rtol=_KTOL, atol=_KTOL * rd * rd, smooth_ends=True)
        arc = res.check("matern-G", rtol=_KTOL, atol=_KTOL * rd * rd)
        out = (inner + 2 / np.pi * arc) / rd**2
        return np.clip(out, 0.0, 1.0).reshape(shape)

    def _g(self, r, s):
        rd = self.rd
        disk = r < np.maximum(rd - s, 0.0)
        ring = (r >= np.abs(rd - s)) & (r <= rd + s)
        # r == 0 or s == 0: the arccos term is replaced by its limit
        degenerate = (r * s == 0)
        ring_val = np.where(ring & ~degenerate, self._angle(r, s) / np.pi, 0.0)
        disk_val = np.where(degenerate, (r <= rd) * 1.0, disk * 1.0)
        return 2 * r / rd**2 * (disk_val + ring_val)

    def sample_offsets(self, rng, n):
        rad = self.rd * np.sqrt(rng.random(n))
        ang = 2 * np.pi * rng.random(n)
        return np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])


@dataclass(frozen=True, eq=False)
class NumericRadial(DaughterKernel):
    """Arbitrary radial density ``f_d`` handled by quadrature.

    ``fd_func`` must be numpy-vectorised and normalised so that
    ``2 pi int_0^inf f(s) s ds == 1`` (checked to 1e-8).  ``support_radius``
    declares a density that vanishes beyond that radius; the angular
    integral is then cut exactly at the support boundary.
    """

    fd_func: Callable[[np.ndarray], np.ndarray]
    support_radius: Optional[float] = None
    _stats: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        R = self.support_radius
        if R is not None and not (np.isfinite(R) and R > 0):
            raise ValueError("support_radius must be positive")
        mass = self._radial_moment(1)
        if abs(mass - 1.0) > 1e-8:
            raise ValueError(f"radial density is not normalised: 2*pi*int f(s) s ds = {mass!r}")
        self._stats["m2"] = self._radial_moment(3)
        self._stats["reach"] = R if R is not None else self._tail_radius()

    @property
    def bounded(self):
        return self.support_radius is not None

    def _radial_moment(self, power):
        R = self.support_radius
        if R is not None:
            res = integrate_batch(lambda x, i: 2 * np.pi * x**power * self.fd_func(x),
                                  [0.0], [R], rtol=1e-12, atol=1e-14)
        else:
            # s = t / (1 - t)
            def f(t, i):
                s = t / (1 - t)
                return 2 * np.pi * s**power * self.fd_func(s) / (1 - t) ** 2
            res = integrate_batch(f, [0.0], [1.0], rtol=1e-12, atol=1e-14)
        return float(res.value[0])

    def _tail_radius(self, mass=1e-16):
        rho = max(np.sqrt(self._stats["m2"]), 1e-300)
        while True:
            res = integrate_batch(lambda t, i: 2 * np.pi * (rho / t) * self.fd_func(rho / t) * rho / t**2,
                                  [0.0], [1.0], rtol=1e-8, atol=mass * 1e-2)
            if res.value[0] < mass or rho > 1e12:
                return rho
            rho *= 1.5

    @property
    def spread(self):
        return float(np.sqrt(self._stats["m2"] / 2))

    @property
    def reach(self):
        return self._stats["reach"]

    @property
    def second_moment(self):
        return self._stats["m2"]

    def kinks(self, s):
        s = np.asarray(s, dtype=float)
        if self.support_radius is None:
            return np.full(s.shape, np.nan)
        return np.abs(self.support_radius - s)

    def _fd(self, s):
        out = np.asarray(self.fd_func(s), dtype=float)
        if self.support_radius is not None:
            out = np.where(s <= self.support_radius, out, 0.0)
        return out

    def _g(self, r, s):
        r, s = np.broadcast_arrays(np.asarray(r, float), np.asarray(s, float))
        shape = r.shape
        r = r.ravel()
        s = s.ravel()
        # the integrand peaks near phi = 0 with angular width ~ spread / max(r, s)
        width = self.spread / max(float(np.max(np.maximum(r, s), initial=0.0)), self.spread)
        panels = int(min(64, max(1, np.ceil(np.pi / (8 * width)))))
        t = (np.arange(panels)[:, None] + _GL_X[None, :]).ravel() / panels
        w = np.tile(_GL_W, panels) / panels
        out = np.empty(r.size)
        block = max(1, 2**21 // t.size)
        for k in range(0, r.size, block):
            out[k:k + block] = self._g_block(r[k:k + block], s[k:k + block], t, w)
        return out.reshape(shape)

    def _g_block(self, r, s, t, w):
        R = self.reach
        rs = r * s
        phi_max = np.where(rs > 0, _half_angle(r, s, R), np.pi)
        phi_max = np.where(np.abs(r - s) > R, 0.0, phi_max)
        phi = phi_max[:, None] * t[None, :]
        d = np.sqrt((r - s)[:, None] ** 2 + 4 * rs[:, None] * np.sin(0.5 * phi) ** 2)
        return 2 * r * phi_max * (self._fd(d) @ w)

    def _G(self, r, s):
        r, s = np.broadcast_arrays(np.asarray(r, float), np.asarray(s, float))
        shape = r.shape
        r = r.ravel()
        s = s.ravel()
        lo, hi = self.support(s)
        hi = np.minimum(hi, r)

        def f(u, i):
            return self._g(u, np.broadcast_to(s[i], u.shape))

        res = integrate_batch(f, lo, hi, rtol=1e-10, atol=1e-12,
                              breakpoints=[self.kinks(s), s], smooth_ends=True)
        out = res.check("numeric-G", rtol=1e-10, atol=1e-12)
        return np.clip(out, 0.0, 1.0).reshape(shape)

    def _radial_table(self):
        tab = self._stats.get("table")
        if tab is None:
            rho = np.linspace(0.0, self.reach, 4097)
            res = integrate_batch(lambda x, i: 2 * np.pi * x * self._fd(x),
                                  rho[:-1], rho[1:], rtol=1e-10, atol=1e-16)
            cdf = np.concatenate([[0.0], np.cumsum(res.value)])
            cdf /= cdf[-1]
            tab = self._stats["table"] = (cdf, rho)
        return tab

    def sample_offsets(self, rng, n):
        cdf, rho = self._radial_table()
        rad = np.interp(rng.random(n), cdf, rho)
        ang = 2 * np.pi * rng.random(n)
        return np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
