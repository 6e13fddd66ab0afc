"""Cluster models and their contact-distance distributions.

The contact distance is the distance from the origin to the nearest base
station.  Given the parent points, the process is an inhomogeneous Poisson
process, so the conditional law is a product over parents; averaging over the
Poisson parents gives the unconditional law through the PGFL.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .kernels import DaughterKernel
from .quadrature import QuadratureConfig, integrate_batch

__all__ = [
    "ClusterModel",
    "PoissonModel",
    "conditional_cd_cdf",
    "conditional_cd_pdf",
    "unconditional_cd_cdf",
    "NEGLIGIBLE_EXPONENT",
]

#: parents with ``alpha * G(r | s)`` below this may be dropped from products
NEGLIGIBLE_EXPONENT = 1e-14


@dataclass(frozen=True)
class ClusterModel:
    """Poisson parents of intensity ``lambda_p``, Poisson(``alpha``) daughters each."""

    lambda_p: float
    alpha: float
    kernel: DaughterKernel

    def __post_init__(self):
        for name in ("lambda_p", "alpha"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive")
        if not isinstance(self.kernel, DaughterKernel):
            raise TypeError("kernel must be a DaughterKernel")

    @property
    def intensity(self) -> float:
        """Base-station intensity ``lambda_p * alpha``."""
        return self.lambda_p * self.alpha


@dataclass(frozen=True)
class PoissonModel:
    """Homogeneous PPP of base stations; the limit a cluster model is checked against.

    Simulated as parents carrying exactly one daughter at zero offset.
    """

    intensity: float

    def __post_init__(self):
        if not (np.isfinite(self.intensity) and self.intensity > 0):
            raise ValueError("intensity must be positive")


def _distances(parent_distances):
    s = np.asarray(parent_distances, dtype=float).ravel()
    if np.any(np.isnan(s)) or np.any(s < 0):
        raise ValueError("parent distances must be non-negative")
    return s


def _radius(r):
    r = np.asarray(r, dtype=float)
    if np.any(np.isnan(r)) or np.any(r < 0):
        raise ValueError("r must be non-negative")
    return r


def _exponent(model, r, s):
    # alpha * sum_i G(r | s_i), shape of r
    if s.size == 0:
        return np.zeros(r.shape)
    G = model.kernel._G(r[..., None], s)
    return model.alpha * G.sum(axis=-1)


def conditional_cd_cdf(model: ClusterModel, r, parent_distances):
    """Contact-distance CDF given the parents' distances from the origin.

    ``1 - prod_i exp(-alpha G(r | s_i))``.  Truncating the parent list is the
    caller's responsibility; parents with ``alpha G(r | s) <
    NEGLIGIBLE_EXPONENT`` contribute nothing measurable.
    """
    r = _radius(r)
    s = _distances(parent_distances)
    out = -np.expm1(-_exponent(model, r, s))
    return float(out) if out.ndim == 0 else out


def conditional_cd_pdf(model: ClusterModel, r, parent_distances):
    """Density of :func:`conditional_cd_cdf` with respect to ``r``."""
    r = _radius(r)
    s = _distances(parent_distances)
    if s.size == 0:
        out = np.zeros(r.shape)
    else:
        gsum = model.kernel._g(r[..., None], s).sum(axis=-1)
        out = model.alpha * gsum * np.exp(-_exponent(model, r, s))
    return float(out) if out.ndim == 0 else out


def void_exponent(model: ClusterModel, r, quad: Optional[QuadratureConfig] = None):
    """``2 pi lambda_p int_0^inf [1 - exp(-alpha G(r|s))] s ds`` (minus log void probability)."""
    quad = quad or QuadratureConfig()
    r = _radius(r)
    shape = r.shape
    r = r.ravel()
    if isinstance(model, PoissonModel):
        return (model.intensity * np.pi * r * r).reshape(shape)
    k = model.kernel
    # G(r | s) vanishes (or is below 1e-20) once s > r + reach
    hi = r + k.reach
    rtol, atol = quad.level(1)

    def f(s, i):
        return -np.expm1(-model.alpha * k._G(r[i], s)) * s

    res = integrate_batch(f, np.zeros_like(r), hi, rtol=rtol, atol=atol,
                          breakpoints=[k.kinks(r), r], max_depth=quad.max_subdivisions, smooth_ends=True)
    val = res.check("contact-s", rtol=rtol, atol=atol)
    return (2 * np.pi * model.lambda_p * val).reshape(shape)


def unconditional_cd_cdf(model, r, quad: Optional[QuadratureConfig] = None):
    """Unconditional contact-distance CDF of the cluster process.

    Vectorised over ``r``; for a :class:`PoissonModel` this is the familiar
    ``1 - exp(-lambda pi r^2)``.
    """
    out = -np.expm1(-void_exponent(model, r, quad))
    return float(out) if out.ndim == 0 else out
