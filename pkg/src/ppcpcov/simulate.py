"""Monte Carlo ground truth for coverage and contact distance.

Each replication draws an independent cluster-process realisation on a disk
around the typical user at the origin, applies unit-mean Rayleigh fading and
nearest-BS association, and records the SIR and the contact distance.

Replication ``i`` owns the random stream ``Philox(key=(seed, i))``: a
counter-based generator keyed by the replication index, so the results do not
depend on how replications are split between worker processes.
"""

from __future__ import annotations

import logging
import os
import pickle
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .contact import PoissonModel
from .coverage import PathLoss
from .kernels import Matern, Thomas

__all__ = [
    "SimConfig",
    "Realization",
    "CoverageEstimate",
    "SimulationResult",
    "ContactSample",
    "replication_rng",
    "sample_realization",
    "sir_at_origin",
    "simulate",
    "estimates",
    "mc_coverage",
    "mc_contact_distance",
    "WORKERS_ENV",
]

log = logging.getLogger(__name__)

#: environment variable overriding the number of worker processes
WORKERS_ENV = "PPCPCOV_WORKERS"

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SimConfig:
    """Simulation window and replication settings.

    ``parent_buffer=None`` picks a kernel-dependent default (``5 sigma`` for
    Thomas, ``r_d`` for Matern, the kernel reach otherwise).  ``thresholds``
    are linear SIR thresholds.
    """

    window_radius: float = 100.0
    parent_buffer: Optional[float] = None
    replications: int = 20_000
    seed: int = 0
    thresholds: Sequence[float] = ()

    def __post_init__(self):
        if not (np.isfinite(self.window_radius) and self.window_radius > 0):
            raise ValueError("window_radius must be positive")
        if self.parent_buffer is not None and not (self.parent_buffer >= 0):
            raise ValueError("parent_buffer must be non-negative")
        if int(self.replications) != self.replications or self.replications < 1:
            raise ValueError("replications must be a positive integer")
        if any(not (float(t) > 0 and np.isfinite(float(t))) for t in self.thresholds):
            raise ValueError("thresholds must be positive")

    def buffer_for(self, model) -> float:
        if self.parent_buffer is not None:
            return float(self.parent_buffer)
        if isinstance(model, PoissonModel):
            return 0.0
        k = model.kernel
        if isinstance(k, Thomas):
            return 5.0 * k.sigma
        if isinstance(k, Matern):
            return k.rd
        return float(k.reach)


@dataclass
class Realization:
    parents: np.ndarray
    daughters: np.ndarray
    parent_index: np.ndarray


@dataclass(frozen=True)
class CoverageEstimate:
    theta: float
    mean: float
    std_error: float
    replications: int
    empty_windows: int = 0


@dataclass(frozen=True)
class SimulationResult:
    """Per-replication SIR and contact distance (NaN where the window was empty)."""

    sir: np.ndarray
    contact: np.ndarray

    @property
    def empty_windows(self) -> int:
        return int(np.count_nonzero(np.isnan(self.contact)))


@dataclass(frozen=True)
class ContactSample:
    distances: np.ndarray
    empty_windows: int = 0


def replication_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for replication ``index``."""
    return np.random.Generator(np.random.Philox(key=[int(seed) & _MASK64, int(index) & _MASK64]))


def _sample(model, cfg: SimConfig, rng: np.random.Generator) -> Realization:
    R = cfg.window_radius + cfg.buffer_for(model)
    lam = model.intensity if isinstance(model, PoissonModel) else model.lambda_p
    n = rng.poisson(lam * np.pi * R * R)
    rad = R * np.sqrt(rng.random(n))
    ang = 2 * np.pi * rng.random(n)
    parents = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
    if isinstance(model, PoissonModel):
        return Realization(parents, parents.copy(), np.arange(n))
    counts = rng.poisson(model.alpha, n)
    idx = np.repeat(np.arange(n), counts)
    daughters = parents[idx] + model.kernel.sample_offsets(rng, idx.size)
    return Realization(parents, daughters, idx)


def sample_realization(model, cfg: SimConfig, replication_index: int) -> Realization:
    """The realisation used by replication ``replication_index`` (deterministic)."""
    return _sample(model, cfg, replication_rng(cfg.seed, replication_index))


def _sir(d2: np.ndarray, beta: float, rng: np.random.Generator):
    m = d2.size
    if m == 0:
        return None
    h = rng.standard_exponential(m)
    p = h * d2 ** (-0.5 * beta)
    j = int(np.argmin(d2))
    interference = p[:j].sum() + p[j + 1:].sum()
    if interference == 0:
        return float("inf")
    return float(p[j] / interference)


def sir_at_origin(real: Realization, pl: PathLoss, rng: np.random.Generator):
    """SIR of the nearest base station, or ``None`` for an empty realisation.

    Draws one unit-mean exponential fading mark per base station from ``rng``.
    A lone base station has no interference and returns ``inf``.
    """
    d = real.daughters
    return _sir(d[:, 0] ** 2 + d[:, 1] ** 2, pl.beta, rng)


def _run_block(model, pl: PathLoss, cfg: SimConfig, start: int, stop: int):
    sir = np.full(stop - start, np.nan)
    contact = np.full(stop - start, np.nan)
    for k, i in enumerate(range(start, stop)):
        rng = replication_rng(cfg.seed, i)
        real = _sample(model, cfg, rng)
        d = real.daughters
        d2 = d[:, 0] ** 2 + d[:, 1] ** 2
        val = _sir(d2, pl.beta, rng)
        if val is not None:
            sir[k] = val
            contact[k] = np.sqrt(d2.min())
    return sir, contact


def _workers(workers: Optional[int]) -> int:
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        workers = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(workers))


def _picklable(*objs) -> bool:
    try:
        pickle.dumps(objs)
    except Exception:
        return False
    return True


def simulate(model, pl: PathLoss, cfg: SimConfig, workers: Optional[int] = None) -> SimulationResult:
    """Run all replications; results are identical for any worker count."""
    n = int(cfg.replications)
    workers = min(_workers(workers), n)
    if workers > 1 and not _picklable(model, pl, cfg):
        log.info("model not picklable; simulating in-process")
        workers = 1
    if workers == 1:
        sir, contact = _run_block(model, pl, cfg, 0, n)
    else:
        edges = np.linspace(0, n, 4 * workers + 1).astype(int)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_block, model, pl, cfg, a, b)
                       for a, b in zip(edges[:-1], edges[1:]) if b > a]
            parts = [f.result() for f in futures]
        sir = np.concatenate([p[0] for p in parts])
        contact = np.concatenate([p[1] for p in parts])
    res = SimulationResult(sir, contact)
    if res.empty_windows:
        log.warning("%d of %d replications had no base station", res.empty_windows, n)
    return res


def estimates(result: SimulationResult, thresholds) -> list[CoverageEstimate]:
    """Coverage estimates from stored SIR samples; empty windows count as not covered."""
    sir = result.sir
    n = sir.size
    out = []
    for t in thresholds:
        t = float(t)
        covered = int(np.count_nonzero(sir > t))  # NaN compares False
        p = covered / n
        out.append(CoverageEstimate(t, p, float(np.sqrt(p * (1 - p) / n)), n, result.empty_windows))
    return out


def mc_coverage(model, pl: PathLoss, cfg: SimConfig, workers: Optional[int] = None) -> list[CoverageEstimate]:
    """Monte Carlo coverage at every threshold of ``cfg`` using common random numbers."""
    return estimates(simulate(model, pl, cfg, workers), cfg.thresholds)


def mc_contact_distance(model, cfg: SimConfig, workers: Optional[int] = None) -> ContactSample:
    """Distance from the origin to the nearest base station in each replication."""
    res = simulate(model, PathLoss(), cfg, workers)
    d = res.contact
    return ContactSample(d[~np.isnan(d)], res.empty_windows)
