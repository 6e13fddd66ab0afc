import numpy as np
import pytest
from scipy import integrate

from ppcpcov import (ClusterModel, Matern, PathLoss, PoissonModel, QuadratureConfig, Thomas,
                     conditional_cd_cdf, conditional_cd_pdf, unconditional_cd_cdf)
from ppcpcov.coverage import M_functional, contact_density, outer_radius

from conftest import matern_model, thomas_model


def test_model_validation():
    with pytest.raises(ValueError):
        ClusterModel(0.0, 10.0, Thomas(1.0))
    with pytest.raises(ValueError):
        ClusterModel(0.1, -1.0, Thomas(1.0))
    with pytest.raises(TypeError):
        ClusterModel(0.1, 1.0, "thomas")
    assert ClusterModel(0.1 / np.pi, 10.0, Thomas(1.0)).intensity == pytest.approx(1 / np.pi)


def test_conditional_trivial_cases():
    m = thomas_model(0.7)
    assert conditional_cd_cdf(m, 0.0, [0.5, 2.0, 7.0]) == 0.0
    r = np.linspace(0, 5, 11)
    assert np.all(conditional_cd_cdf(m, r, []) == 0.0)
    assert np.all(conditional_cd_pdf(m, r, []) == 0.0)
    with pytest.raises(ValueError):
        conditional_cd_cdf(m, 1.0, [1.0, -0.1])
    with pytest.raises(ValueError):
        conditional_cd_cdf(m, -1.0, [1.0])


def test_single_centred_thomas_parent():
    sigma2, alpha = 0.6, 7.0
    m = ClusterModel(0.1, alpha, Thomas.from_variance(sigma2))
    r = np.linspace(0, 4, 21)
    e = np.exp(-r * r / (2 * sigma2))
    assert np.allclose(conditional_cd_cdf(m, r, [0.0]), 1 - np.exp(-alpha * (1 - e)), atol=1e-12)
    pdf = alpha * r / sigma2 * e * np.exp(-alpha * (1 - e))
    assert np.allclose(conditional_cd_pdf(m, r, [0.0]), pdf, atol=1e-12)


def test_pdf_is_derivative_of_cdf():
    m = ClusterModel(0.1, 10.0, Matern(2.0))
    h = 1e-6
    fd = (conditional_cd_cdf(m, 0.8 + h, [1, 3]) - conditional_cd_cdf(m, 0.8 - h, [1, 3])) / (2 * h)
    assert abs(conditional_cd_pdf(m, 0.8, [1, 3]) - fd) < 1e-6
    t = thomas_model(0.3)
    parents = [0.2, 1.4, 2.2, 5.0]
    for r in (0.3, 1.0, 2.5):
        fd = (conditional_cd_cdf(t, r + h, parents) - conditional_cd_cdf(t, r - h, parents)) / (2 * h)
        assert abs(conditional_cd_pdf(t, r, parents) - fd) < 1e-6


def test_conditional_monotonicity():
    r = np.linspace(0, 6, 61)
    parents = [0.3, 1.7, 4.0]
    for k in (Thomas(0.7), Matern(1.3)):
        lo = conditional_cd_cdf(ClusterModel(0.1, 3.0, k), r, parents)
        hi = conditional_cd_cdf(ClusterModel(0.1, 9.0, k), r, parents)
        more = conditional_cd_cdf(ClusterModel(0.1, 3.0, k), r, parents + [2.5])
        assert np.all(np.diff(lo) >= 0)
        assert np.all(hi >= lo)
        assert np.all(more >= lo)
        assert np.all((lo >= 0) & (lo <= 1))


@pytest.mark.parametrize("model", [thomas_model(0.7), matern_model(2.8)], ids=["tpp", "mcp"])
def test_unconditional_basic(model):
    assert unconditional_cd_cdf(model, 0.0) == 0.0
    r = np.linspace(0, 8, 33)
    F = unconditional_cd_cdf(model, r)
    assert np.all(np.diff(F) >= 0)
    # parents are sparse (0.1 per unit disk), so the void probability decays
    # like exp(-lambda_p pi r^2) rather than exp(-r^2)
    assert F[-1] > 1 - 1e-3
    assert unconditional_cd_cdf(model, 30.0) > 1 - 1e-12
    assert np.all((F >= 0) & (F <= 1))


def test_unconditional_ppp():
    m = PoissonModel(0.5)
    r = np.linspace(0, 3, 7)
    assert np.allclose(unconditional_cd_cdf(m, r), 1 - np.exp(-0.5 * np.pi * r * r), atol=1e-15)


def test_unconditional_against_brute_force_s_integral():
    model = thomas_model(0.3)
    k = model.kernel
    for r in (0.4, 1.5):
        s = np.linspace(0, r + k.reach, 40001)
        val = integrate.simpson(-np.expm1(-model.alpha * k.G(r, s)) * s, x=s)
        ref = -np.expm1(-2 * np.pi * model.lambda_p * val)
        assert unconditional_cd_cdf(model, r) == pytest.approx(ref, abs=1e-8)


@pytest.mark.parametrize("model", [thomas_model(1.5), matern_model(1.2)], ids=["tpp", "mcp"])
def test_unconditional_equals_one_minus_M(model):
    r = np.array([0.2, 0.9, 2.0, 3.5])
    M = M_functional(model, PathLoss(4.0), r, 0.0)
    assert np.max(np.abs(unconditional_cd_cdf(model, r) - (1 - M))) < 1e-8


@pytest.mark.parametrize("model", [thomas_model(0.7), matern_model(6.0)], ids=["tpp", "mcp"])
def test_contact_density_integrates_to_one(model):
    R = outer_radius(model)
    val = integrate.quad(lambda r: contact_density(model, r), 0, R, limit=200,
                         epsabs=1e-10, epsrel=1e-9)[0]
    assert abs(val - 1) < 1e-4


def test_contact_density_is_derivative_of_cdf():
    model = thomas_model(0.7)
    h = 1e-4
    tight = QuadratureConfig(rel_tol=1e-9, abs_tol=1e-12)
    for r in (0.5, 1.2, 2.4):
        fd = (unconditional_cd_cdf(model, r + h, tight) - unconditional_cd_cdf(model, r - h, tight)) / (2 * h)
        assert abs(contact_density(model, r, tight) - fd) < 1e-6
