"""Simulation designs: regressor law, error laws, model equations."""

import math

import numpy as np
import pytest

from lossspec.dgp import (
    DELTA_SHAPES,
    DGPSpec,
    ERROR_DISTS,
    MODELS,
    gen_errors,
    gen_regressor,
    gen_sample,
    parse_model,
)
from lossspec.exceptions import DataFormatError

BOUND = 2.0 * math.sqrt(4.0 / 3.0)

# golden first draws, seed 42; locks the stream layout across refactors
GOLDEN_ERRORS = {
    "normal": [0.44264168665265796, -0.17454518442327457, 0.42051882590758954],
    "student_t5": [0.505124369293697, -0.22151250576837223, -0.3796630164761547],
    "uniform01": [-0.7378041198192337, -1.5469815304902732, -1.1269785780575972],
    "lognormal": [-0.04252589930665179, -0.37427509352718796, -0.05828707557816087],
    "chisq1": [-0.5906078187476216, -0.6639600207223307, -0.7008278719759041],
}
GOLDEN_X = [
    -2.063064240112789,
    -1.5085726216896846,
    -1.3657777391760382,
    -2.309401076758503,
    -2.279234487201345,
]


def test_regressor_clipped_to_two_sd():
    x = gen_regressor(5000, seed=8)
    assert np.all(np.abs(x) <= BOUND)
    # the clip leaves atoms exactly at the boundary
    assert np.any(np.abs(x) == BOUND)


def test_regressor_reject_mode_stays_inside():
    x = gen_regressor(2000, seed=3, truncation="reject")
    assert np.all(np.abs(x) <= BOUND)
    assert not np.any(np.abs(x) == BOUND)


def test_regressor_autocorrelation_near_half():
    x = gen_regressor(60000, seed=21)
    rho = np.corrcoef(x[1:], x[:-1])[0, 1]
    assert rho == pytest.approx(0.5, abs=0.03)


def test_regressor_golden_values():
    np.testing.assert_allclose(gen_regressor(5, seed=42), GOLDEN_X, rtol=0, atol=0)


def test_regressor_prefix_stability():
    # first draws do not depend on how many are requested
    short = gen_regressor(10, seed=4)
    long = gen_regressor(200, seed=4)
    np.testing.assert_array_equal(short, long[:10])


@pytest.mark.parametrize("dist", ERROR_DISTS)
def test_error_laws_standardized(dist):
    e = gen_errors(dist, 400000, seed=1)
    assert e.mean() == pytest.approx(0.0, abs=0.02)
    target_var = 5.0 / 3.0 if dist == "student_t5" else 1.0
    assert e.var() == pytest.approx(target_var, rel=0.03)


@pytest.mark.parametrize("dist", ERROR_DISTS)
def test_error_golden_values(dist):
    np.testing.assert_allclose(
        gen_errors(dist, 3, seed=42), GOLDEN_ERRORS[dist], rtol=0, atol=0
    )


def test_errors_and_regressor_use_separate_streams():
    x = gen_regressor(50, seed=9)
    e = gen_errors("normal", 50, seed=9)
    assert not np.allclose(x, e)


def test_model_enumeration_and_aliases():
    assert set(MODELS) >= {"s_null", "p1_quadratic", "p2_threshold", "p3_smooth_transition", "local"}
    assert parse_model("p1") == parse_model("p1_quadratic")
    assert parse_model("null") == parse_model("s_null")
    with pytest.raises(DataFormatError):
        parse_model("p9")


def test_null_model_equation():
    spec = DGPSpec(model="s_null", n=40, seed=2)
    s = gen_sample(spec)
    x = gen_regressor(40, seed=2)
    e = gen_errors("normal", 40, seed=2)
    np.testing.assert_array_equal(s.y, 1.0 + x + e)
    np.testing.assert_array_equal(s.x[:, 0], x)


@pytest.mark.parametrize("model", ["p1", "p2"])
def test_theta_zero_collapses_to_null(model):
    base = gen_sample(DGPSpec(model="s_null", n=80, seed=17))
    alt = gen_sample(DGPSpec(model=model, n=80, seed=17, theta=0.0))
    assert np.array_equal(alt.y, base.y)
    assert np.array_equal(alt.x, base.x)


def test_p1_quadratic_equation():
    theta = 0.7
    s = gen_sample(DGPSpec(model="p1", n=30, seed=5, theta=theta))
    base = gen_sample(DGPSpec(model="s_null", n=30, seed=5))
    x = base.x[:, 0]
    np.testing.assert_allclose(s.y - base.y, theta * x * x, atol=1e-12)


def test_p2_threshold_equation():
    theta = -0.5
    s = gen_sample(DGPSpec(model="p2", n=30, seed=5, theta=theta))
    base = gen_sample(DGPSpec(model="s_null", n=30, seed=5))
    x = base.x[:, 0]
    expected = np.where(x > 0, 0.0, theta * x)
    np.testing.assert_allclose(s.y - base.y, expected, atol=1e-12)


def test_p3_transition_equation():
    theta = 1.5
    s = gen_sample(DGPSpec(model="p3", n=30, seed=5, theta=theta))
    base = gen_sample(DGPSpec(model="s_null", n=30, seed=5))
    x = base.x[:, 0]
    logistic = 1.0 / (1.0 + np.exp(-x))
    np.testing.assert_allclose(s.y - base.y, (1.0 - theta * logistic) * x, atol=1e-12)


def test_p3_theta_zero_doubles_slope():
    s = gen_sample(DGPSpec(model="p3", n=30, seed=5, theta=0.0))
    e = gen_errors("normal", 30, seed=5)
    x = gen_regressor(30, seed=5)
    np.testing.assert_allclose(s.y, 1.0 + 2.0 * x + e, atol=1e-12)


def test_local_alternative_centering_and_scale():
    n = 400
    omega = 2.0 / 9.0
    local = gen_sample(
        DGPSpec(model="local", n=n, seed=31, delta_shape="centered_quadratic", local_omega=omega)
    )
    base = gen_sample(DGPSpec(model="s_null", n=n, seed=31))
    bump = local.y - base.y
    # sample-centered shape: the disturbance sums to zero exactly
    assert bump.mean() == pytest.approx(0.0, abs=1e-14)
    h = n ** (-omega)
    a_n = n ** (-0.5) * h ** (-0.25)
    x = base.x[:, 0]
    delta = x * x
    np.testing.assert_allclose(bump, a_n * (delta - delta.mean()), atol=1e-12)


def test_local_cosine_shape_differs():
    quad_y = gen_sample(DGPSpec(model="local", n=100, seed=3)).y
    cos_y = gen_sample(
        DGPSpec(model="local", n=100, seed=3, delta_shape="centered_cosine")
    ).y
    assert not np.array_equal(quad_y, cos_y)
    assert set(DELTA_SHAPES) == {"centered_quadratic", "centered_cosine"}


def test_spec_validation():
    with pytest.raises(DataFormatError):
        DGPSpec(model="s_null", n=0, seed=1)
    with pytest.raises(DataFormatError):
        DGPSpec(model="local", n=50, seed=1, local_omega=0.6)
    with pytest.raises(DataFormatError):
        DGPSpec(model="local", n=50, seed=1, delta_shape="bump")
    with pytest.raises(DataFormatError):
        DGPSpec(model="s_null", n=50, seed=1, error_dist="cauchy")
    with pytest.raises(DataFormatError):
        DGPSpec(model="s_null", n=50, seed=1, truncation="wrap")


def test_sample_is_validated_container():
    s = gen_sample(DGPSpec(model="s_null", n=25, seed=1))
    assert s.n == 25 and s.p == 1
    assert s.x.shape == (25, 1)
    assert np.all(np.isfinite(s.y))
