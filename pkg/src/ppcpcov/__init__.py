"""Downlink coverage of cellular networks with Poisson cluster base stations.

Analytic coverage probability (nested quadrature) and Monte Carlo estimates
for Thomas, Matern and arbitrary radial cluster kernels.
"""

from .contact import (
    ClusterModel,
    PoissonModel,
    conditional_cd_cdf,
    conditional_cd_pdf,
    unconditional_cd_cdf,
)
from .coverage import (
    C_factor,
    M_functional,
    PathLoss,
    SirThreshold,
    T_functional,
    contact_density,
    coverage_curve,
    coverage_integral,
    coverage_probability,
    ppp_baseline,
)
from .kernels import DaughterKernel, Matern, NumericRadial, Thomas
from .quadrature import QuadratureConfig, QuadratureError, TailBoundError
from .simulate import (
    CoverageEstimate,
    SimConfig,
    mc_contact_distance,
    mc_coverage,
    sample_realization,
    simulate,
    sir_at_origin,
)
from .specfun import bessel_i0_scaled, marcum_q1, rice_pdf

__version__ = "0.1.0"

__all__ = [
    "ClusterModel", "PoissonModel", "conditional_cd_cdf", "conditional_cd_pdf",
    "unconditional_cd_cdf",
    "C_factor", "M_functional", "PathLoss", "SirThreshold", "T_functional", "contact_density",
    "coverage_curve", "coverage_integral", "coverage_probability", "ppp_baseline",
    "DaughterKernel", "Matern", "NumericRadial", "Thomas",
    "QuadratureConfig", "QuadratureError", "TailBoundError",
    "CoverageEstimate", "SimConfig", "mc_contact_distance", "mc_coverage", "sample_realization",
    "simulate", "sir_at_origin",
    "bessel_i0_scaled", "marcum_q1", "rice_pdf",
]
