import numpy as np
import pytest

from ppcpcov import ClusterModel, Matern, PathLoss, Thomas

LAMBDA_P = 0.1 / np.pi
ALPHA = 10.0

_ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE:
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def acceptance_log():
    """Append ``(criterion, passed, detail)``; summarised after the run."""

    def record(name, passed, detail=""):
        _ACCEPTANCE.append(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
        return passed

    return record


@pytest.fixture
def pl4():
    return PathLoss(4.0)


def thomas_model(sigma2, lambda_p=LAMBDA_P, alpha=ALPHA):
    return ClusterModel(lambda_p, alpha, Thomas.from_variance(sigma2))


def matern_model(rd2, lambda_p=LAMBDA_P, alpha=ALPHA):
    return ClusterModel(lambda_p, alpha, Matern.from_radius_squared(rd2))


ACCEPTANCE_DB = (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0)


@pytest.fixture(scope="session")
def preset_runs():
    """Lazily simulated presets at full size (20,000 replications), shared across tests."""
    from ppcpcov.config import builtin_presets
    from ppcpcov.simulate import simulate

    presets = builtin_presets()
    cache = {}

    def get(name):
        if name not in cache:
            cfg = presets[name]
            cache[name] = simulate(cfg.model(), cfg.pathloss(), cfg.sim())
        return cache[name]

    return get
