"""Null fit, test statistics, and asymptotic standardization."""

import numpy as np
import pytest
from scipy.stats import norm

from lossspec.exceptions import DataFormatError, DegenerateSampleError
from lossspec.kernels import kernel_constants, parse_kernel
from lossspec.loss import linex_loss, loss_curvature, quadratic_loss
from lossspec.smoothing import Sample, SmoothFit, nw_fit
from lossspec.stats import (
    METHODS,
    TestSpec,
    asymptotic_calibration_glr,
    asymptotic_calibration_q,
    estimate_omega,
    f_statistic,
    glr_statistic,
    loss_statistic,
    ols_fit,
    parse_test,
)

UNIF_K = kernel_constants(parse_kernel("uniform"))


def _linear_sample(n=60, seed=0, noise=1.0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, 1))
    y = 2.0 + 3.0 * x[:, 0] + noise * rng.normal(size=n)
    return Sample(y=y, x=x)


def test_ols_recovers_line():
    s = _linear_sample(noise=0.0)
    fit = ols_fit(s)
    np.testing.assert_allclose(fit.theta_hat, [2.0, 3.0], atol=1e-10)
    assert fit.ssr0 == pytest.approx(0.0, abs=1e-18)


def test_ols_residuals_orthogonal_to_design():
    s = _linear_sample(seed=3)
    fit = ols_fit(s)
    design = np.column_stack([np.ones(s.n), s.x])
    np.testing.assert_allclose(design.T @ fit.residuals, 0.0, atol=1e-8)
    assert fit.ssr0 == pytest.approx(float(fit.residuals @ fit.residuals), rel=1e-12)


def test_ols_rank_deficient():
    y = np.arange(10.0)
    x = np.full((10, 1), 3.0)
    with pytest.raises(DegenerateSampleError):
        ols_fit(Sample(y=y, x=x))


def test_loss_statistic_hand_check():
    m_hat = np.array([0.5, -0.5, 1.0, 0.0])
    fit = SmoothFit(m_hat=m_hat, ssr1=2.0, h=0.4)
    q_hat, q = loss_statistic(fit, quadratic_loss())
    assert q_hat == pytest.approx(1.5)
    # denominator ssr1/n = 0.5
    assert q == pytest.approx(3.0)
    _, q0 = loss_statistic(fit, quadratic_loss(), denominator="ssr0", ssr0=4.0)
    assert q0 == pytest.approx(1.5)


def test_loss_statistic_rejects_zero_denominator():
    fit = SmoothFit(m_hat=np.zeros(4), ssr1=0.0, h=0.4)
    with pytest.raises(DegenerateSampleError):
        loss_statistic(fit, quadratic_loss())


def test_loss_statistic_needs_ssr0_when_requested():
    fit = SmoothFit(m_hat=np.zeros(4), ssr1=1.0, h=0.4)
    with pytest.raises(DataFormatError):
        loss_statistic(fit, quadratic_loss(), denominator="ssr0")


def test_glr_statistic_value_and_antisymmetry():
    lam = glr_statistic(ssr0=3.0, ssr1=2.0, n=10)
    assert lam == pytest.approx(5.0 * np.log(1.5), rel=1e-14)
    assert glr_statistic(2.0, 3.0, 10) == pytest.approx(-lam, rel=1e-14)
    assert glr_statistic(2.0, 2.0, 10) == 0.0
    with pytest.raises(DegenerateSampleError):
        glr_statistic(0.0, 1.0, 10)


def test_f_statistic():
    assert f_statistic(ssr0=3.0, ssr1=2.0) == pytest.approx(0.5)
    with pytest.raises(DegenerateSampleError):
        f_statistic(1.0, 0.0)


def test_asymptotic_q_standardization_constants():
    # uniform kernel, quadratic loss: s = a/(D b) = (1/2)/(1/3) = 1.5
    # Omega = 5, h = 0.5: nu = Omega a^2 / (h b) = 5 * 0.25 / (1/6) = 7.5
    out = asymptotic_calibration_q(
        q=6.0,
        constants=UNIF_K,
        curvature=loss_curvature(quadratic_loss()),
        omega_measure=5.0,
        h=0.5,
    )
    assert out.scaling == pytest.approx(1.5, rel=1e-10)
    assert out.centering == pytest.approx(7.5, rel=1e-10)
    expected_z = (1.5 * 6.0 - 7.5) / np.sqrt(2.0 * 7.5)
    assert out.z == pytest.approx(expected_z, rel=1e-12)
    assert out.p_value == pytest.approx(norm.sf(expected_z), rel=1e-12)
    assert out.method == "loss_q"


def test_asymptotic_q_rescales_with_curvature():
    half = asymptotic_calibration_q(
        q=6.0,
        constants=UNIF_K,
        curvature=0.5,
        omega_measure=5.0,
        h=0.5,
        method="loss_q0",
    )
    assert half.scaling == pytest.approx(3.0, rel=1e-10)
    assert half.centering == pytest.approx(7.5, rel=1e-10)
    assert half.method == "loss_q0"


def test_asymptotic_glr_standardization_constants():
    # uniform kernel: r = c/d = (1/4)/(5/24) = 1.2
    # Omega = 5, h = 0.5: mu = Omega c^2 / (h d) = 5*(1/16)/(5/48) = 3
    out = asymptotic_calibration_glr(
        glr=4.0, constants=UNIF_K, omega_measure=5.0, h=0.5
    )
    assert out.scaling == pytest.approx(1.2, rel=1e-10)
    assert out.centering == pytest.approx(3.0, rel=1e-10)
    expected_z = (1.2 * 4.0 - 3.0) / np.sqrt(6.0)
    assert out.z == pytest.approx(expected_z, rel=1e-12)
    assert out.p_value == pytest.approx(norm.sf(expected_z), rel=1e-12)


def test_centering_scales_with_inverse_bandwidth():
    big = asymptotic_calibration_q(1.0, UNIF_K, 1.0, 4.0, h=0.25)
    small = asymptotic_calibration_q(1.0, UNIF_K, 1.0, 4.0, h=0.5)
    assert big.centering == pytest.approx(2.0 * small.centering, rel=1e-12)


def test_multivariate_centering_uses_h_to_the_p():
    k2 = kernel_constants(parse_kernel("uniform"), p=2)
    out = asymptotic_calibration_q(1.0, k2, 1.0, omega_measure=4.0, h=0.5)
    expected = 4.0 * k2.a**2 / (0.5**2 * k2.b)
    assert out.centering == pytest.approx(expected, rel=1e-12)


def test_estimate_omega_product_of_ranges():
    x = np.array([[0.0, 1.0], [2.0, 5.0], [1.0, 3.0]])
    assert estimate_omega(x) == pytest.approx(8.0)
    with pytest.raises(DegenerateSampleError):
        estimate_omega(np.ones((5, 1)))


def test_smoothed_pipeline_statistics_are_consistent():
    s = _linear_sample(n=80, seed=6)
    null = ols_fit(s)
    fit = nw_fit(null.residuals, s.x, parse_kernel("uniform"), h=0.6)
    _, q = loss_statistic(fit, quadratic_loss())
    _, q0 = loss_statistic(fit, quadratic_loss(), denominator="ssr0", ssr0=null.ssr0)
    # ssr1 <= ssr0 up to smoothing noise means q >= q0 typically; check ratio identity
    assert q0 == pytest.approx(q * fit.ssr1 / null.ssr0, rel=1e-12)
    lam = glr_statistic(null.ssr0, fit.ssr1, s.n)
    assert lam == pytest.approx(s.n / 2.0 * np.log(null.ssr0 / fit.ssr1), rel=1e-13)


class TestTestSpec:
    def test_methods_tuple(self):
        assert METHODS == ("loss_q", "loss_q0", "glr", "f")

    def test_default_loss_for_loss_methods(self):
        spec = TestSpec("loss_q")
        assert spec.loss == quadratic_loss()
        assert spec.label() == "loss_q:quadratic"

    def test_glr_rejects_loss(self):
        with pytest.raises(DataFormatError):
            TestSpec("glr", quadratic_loss())
        assert TestSpec("glr").label() == "glr"

    def test_parse_round_trip(self):
        for text in ("loss_q:quadratic", "loss_q0:tq:1.5", "loss_q:linex:0.5,1", "glr", "f"):
            spec = parse_test(text)
            assert parse_test(spec.label()) == spec

    def test_parse_test_rejects(self):
        with pytest.raises(DataFormatError):
            parse_test("wald")
        with pytest.raises(DataFormatError):
            parse_test("glr:quadratic")

    def test_linex_spec_label(self):
        spec = TestSpec("loss_q", linex_loss(0.5, 1.0))
        assert spec.label() == "loss_q:linex:0.5,1"
