"""Experiment configuration: flat ``section.key = value`` files and presets.

Example file::

    mode = compare
    model.kernel = thomas
    model.sigma2 = 0.7
    theta.start_db = -10
    theta.stop_db = 20
    theta.step_db = 1
    sim.replications = 20000

Lines starting with ``#`` are comments.  Unknown keys are rejected.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .contact import ClusterModel, PoissonModel
from .coverage import PathLoss
from .kernels import Matern, Thomas
from .quadrature import QuadratureConfig
from .simulate import SimConfig

__all__ = ["ConfigError", "ExperimentConfig", "MODES", "KERNELS", "builtin_presets",
           "parse_config", "dump_config", "apply_overrides"]

MODES = ("analytic", "simulate", "compare", "contact")
KERNELS = ("thomas", "matern", "ppp")


class ConfigError(ValueError):
    pass


# dotted key -> (field name, type)
_KEYS = {
    "mode": ("mode", str),
    "model.kernel": ("kernel", str),
    "model.lambda_p": ("lambda_p", float),
    "model.alpha": ("alpha", float),
    "model.sigma2": ("sigma2", float),
    "model.rd2": ("rd2", float),
    "pathloss.beta": ("beta", float),
    "theta.start_db": ("theta_start_db", float),
    "theta.stop_db": ("theta_stop_db", float),
    "theta.step_db": ("theta_step_db", float),
    "quad.rel_tol": ("rel_tol", float),
    "quad.abs_tol": ("abs_tol", float),
    "quad.tail_mass_cutoff": ("tail_mass_cutoff", float),
    "quad.max_subdivisions": ("max_subdivisions", int),
    "sim.window_radius": ("window_radius", float),
    "sim.parent_buffer": ("parent_buffer", "buffer"),
    "sim.replications": ("replications", int),
    "sim.seed": ("seed", int),
    "contact.r_max": ("contact_r_max", float),
    "contact.r_step": ("contact_r_step", float),
}


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str = "compare"
    kernel: str = "thomas"
    lambda_p: float = 0.1 / np.pi
    alpha: float = 10.0
    sigma2: float = 0.7
    rd2: float = 2.8
    beta: float = 4.0
    theta_start_db: float = -10.0
    theta_stop_db: float = 20.0
    theta_step_db: float = 1.0
    rel_tol: float = 1e-6
    abs_tol: float = 1e-9
    tail_mass_cutoff: float = 1e-8
    max_subdivisions: int = 40
    window_radius: float = 100.0
    parent_buffer: Optional[float] = None
    replications: int = 20_000
    seed: int = 0
    contact_r_max: float = 6.0
    contact_r_step: float = 0.1

    def validate(self) -> "ExperimentConfig":
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {', '.join(MODES)}")
        if self.kernel not in KERNELS:
            raise ConfigError(f"model.kernel must be one of {', '.join(KERNELS)}")
        for name in ("lambda_p", "alpha", "sigma2", "rd2", "window_radius",
                     "contact_r_max", "contact_r_step", "theta_step_db"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be positive")
        if not self.beta > 2:
            raise ConfigError("pathloss.beta must be > 2")
        if self.replications < 1:
            raise ConfigError("sim.replications must be >= 1")
        if self.parent_buffer is not None and self.parent_buffer < 0:
            raise ConfigError("sim.parent_buffer must be >= 0")
        if self.theta_grid_db().size == 0:
            raise ConfigError("theta grid is empty")
        try:
            self.quadrature()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self

    def theta_grid_db(self) -> np.ndarray:
        start, stop, step = self.theta_start_db, self.theta_stop_db, self.theta_step_db
        if not step > 0 or stop < start:
            return np.empty(0)
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return np.round(start + step * np.arange(n), 12)

    def model(self):
        if self.kernel == "ppp":
            return PoissonModel(self.lambda_p * self.alpha)
        kernel = Thomas.from_variance(self.sigma2) if self.kernel == "thomas" \
            else Matern.from_radius_squared(self.rd2)
        return ClusterModel(self.lambda_p, self.alpha, kernel)

    def pathloss(self) -> PathLoss:
        return PathLoss(self.beta)

    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(self.rel_tol, self.abs_tol, self.tail_mass_cutoff,
                                self.max_subdivisions)

    def sim(self) -> SimConfig:
        thetas = tuple(10.0 ** (self.theta_grid_db() / 10.0))
        return SimConfig(self.window_radius, self.parent_buffer, self.replications,
                         self.seed, thetas)


def _convert(key, kind, text):
    text = text.strip()
    try:
        if kind == "buffer":
            return None if text.lower() == "auto" else float(text)
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
        return text
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r}") from None


def apply_overrides(cfg: ExperimentConfig, pairs) -> ExperimentConfig:
    """Return ``cfg`` updated from ``(dotted_key, text)`` pairs."""
    updates = {}
    for key, text in pairs:
        key = key.strip()
        if key not in _KEYS:
            raise ConfigError(f"unknown key {key!r}")
        name, kind = _KEYS[key]
        updates[name] = _convert(key, kind, text)
    return dataclasses.replace(cfg, **updates)


def parse_config(text: str, base: Optional[ExperimentConfig] = None) -> ExperimentConfig:
    pairs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        pairs.append((key, value))
    return apply_overrides(base or ExperimentConfig(), pairs)


def _format(v):
    if v is None:
        return "auto"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def dump_config(cfg: ExperimentConfig) -> str:
    """Serialise every key; :func:`parse_config` reads it back unchanged."""
    return "".join(f"{key} = {_format(getattr(cfg, name))}\n" for key, (name, _) in _KEYS.items())


def builtin_presets() -> dict[str, ExperimentConfig]:
    """The six network configurations of the reference experiments."""
    base = ExperimentConfig(lambda_p=0.1 / np.pi, alpha=10.0, beta=4.0,
                            window_radius=100.0, replications=20_000)
    out = {}
    for s2 in (0.3, 0.7, 1.5):
        out[f"tpp-{s2}"] = dataclasses.replace(base, kernel="thomas", sigma2=s2)
    for rd2 in (1.2, 2.8, 6.0):
        out[f"mcp-{rd2}"] = dataclasses.replace(base, kernel="matern", rd2=rd2)
    return out
