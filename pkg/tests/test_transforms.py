import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rankone.oracles import h3_gaussian_transform, line_gaussian_ft, line_heat_abel
from rankone.transforms import (
    TransformError,
    abel_transform,
    bump,
    convolve_radial,
    euclidean_ft,
    from_callable,
    from_samples,
    gaussian,
    inverse_ft,
    line_grid,
    lp_norm,
    radial_grid,
    radius_for,
    refine_check,
    spectral_l2,
    spherical_ft,
    tail_ratio,
    weighted_l2,
)


@given(st.floats(0.3, 3.0))
@settings(max_examples=8)
def test_gaussian_transform_h3(a):
    from rankone.spectral_measure import build_plancherel
    from rankone.model_space import hyperbolic_space

    sp = hyperbolic_space(3)
    fh = spherical_ft(sp, gaussian(sp, a), build_plancherel(sp))
    ref = h3_gaussian_transform(a, fh.lam)
    assert np.max(np.abs(fh.values - ref)) < 1e-9 * np.abs(ref).max()


def test_round_trip(h3, pdata3):
    f = gaussian(h3, 1.0)
    u = inverse_ft(pdata3, spherical_ft(h3, f, pdata3))
    assert np.max(np.abs(u.values - f(u.r))) < 1e-8


def test_round_trip_dr(dr11, pdata_dr):
    f = gaussian(dr11, 0.7)
    u = inverse_ft(pdata_dr, spherical_ft(dr11, f, pdata_dr))
    assert np.max(np.abs(u.values - f(u.r))) < 1e-8


@pytest.mark.parametrize("fixture", ["pdata3", "pdata5", "pdata_dr"])
def test_plancherel_identity(request, fixture):
    pdata = request.getfixturevalue(fixture)
    sp = pdata.space
    f = gaussian(sp, 0.8)
    assert lp_norm(sp, f, 2.0) == pytest.approx(spectral_l2(pdata, spherical_ft(sp, f, pdata)), rel=1e-8)


def test_transform_at_i_rho_is_integral(h3, pdata3):
    # phi_{i rho} = 1, so f_hat(i rho) = int f
    f = gaussian(h3, 1.5)
    from rankone.transforms import _spherical_values

    val = _spherical_values(h3, f, np.array([1j * h3.rho]), 1e-10)[0]
    assert val.real == pytest.approx(lp_norm(h3, f, 1.0), rel=1e-9)


def test_abel_of_heat_kernel(h3, pdata3):
    from rankone.kernels import heat_kernel

    t = 0.5
    h = heat_kernel(pdata3, t)
    s = np.linspace(-4.0, 4.0, 41)
    Rf = abel_transform(pdata3, h, s)
    assert np.allclose(Rf.values, line_heat_abel(t, h3.rho, s), atol=1e-9)
    assert np.allclose(Rf.values, Rf.values[::-1], rtol=0, atol=1e-14)


def test_euclidean_ft_of_abel(h3, pdata3):
    f = gaussian(h3, 1.0)
    Rf = abel_transform(pdata3, f)
    lam = np.array([0.0, 0.7, 2.0])
    assert np.allclose(euclidean_ft(Rf, lam), h3_gaussian_transform(1.0, lam), atol=1e-8)


def test_line_grid_symmetric():
    g = line_grid(3.0)
    assert np.array_equal(g.nodes, -g.nodes[::-1])
    assert g.weights.sum() == pytest.approx(6.0, rel=1e-14)


def test_convolution_of_gaussians(h3, pdata3):
    f, g = gaussian(h3, 1.0), gaussian(h3, 2.0)
    conv = convolve_radial(pdata3, f, g)
    # total mass is multiplicative
    assert lp_norm(h3, conv, 1.0) == pytest.approx(lp_norm(h3, f, 1.0) * lp_norm(h3, g, 1.0), rel=1e-7)
    assert conv.rate == pytest.approx(2.0 / 3.0)


def test_convolution_commutes(h3, pdata3):
    f, g = gaussian(h3, 1.0), gaussian(h3, 3.0)
    r = radial_grid(6.0)
    a = convolve_radial(pdata3, f, g, r).values
    b = convolve_radial(pdata3, g, f, r).values
    assert np.allclose(a, b, rtol=0, atol=1e-12)


def test_noise_trimming_on_auto_grid(h5, pdata5):
    from rankone.kernels import heat_kernel

    h = heat_kernel(pdata5, 0.1)
    assert "trimmed_from" in h.meta
    assert tail_ratio(h5, h, 1.0) < 1e-6
    fixed = heat_kernel(pdata5, 0.1, radial_grid(12.0))
    assert fixed.r_max == 12.0 and "trimmed_from" not in fixed.meta


def test_lp_norm_tail_check(h3):
    f = from_callable(h3, lambda r: np.exp(-0.1 * r * r), "gaussian", 0.1, r_max=5.0)
    assert tail_ratio(h3, f) > 1e-6
    with pytest.raises(TransformError):
        lp_norm(h3, f, 1.0)
    assert lp_norm(h3, f, 1.0, tail_budget=1.0) > 0


def test_lp_norm_errors(h3):
    f = gaussian(h3, 1.0)
    with pytest.raises(ValueError):
        lp_norm(h3, f, 0.5)
    assert lp_norm(h3, f, math.inf) == pytest.approx(1.0)


def test_lp_norm_gaussian_h3_by_quad(h3):
    # reference by adaptive quadrature
    from scipy.integrate import quad

    a = 0.6
    ref, _ = quad(lambda r: math.exp(-a * r * r) * 4 * math.pi * math.sinh(r) ** 2, 0, 30)
    assert lp_norm(h3, gaussian(h3, a), 1.0) == pytest.approx(ref, rel=1e-12)


def test_weighted_l2(h3):
    f = gaussian(h3, 1.0)
    assert weighted_l2(h3, f, 0.0) == pytest.approx(lp_norm(h3, f, 2.0), rel=1e-14)
    with pytest.raises(ValueError):
        weighted_l2(h3, f, -1.0)


def test_radius_for():
    from rankone.model_space import hyperbolic_space

    sp = hyperbolic_space(3)
    assert radius_for(sp, "compact", 2.0) == 2.0
    with pytest.raises(TransformError):
        radius_for(sp, "exponential", 1.0)
    with pytest.raises(TransformError):
        radius_for(sp, "unknown", None)
    assert radius_for(sp, "gaussian", 0.5) > radius_for(sp, "gaussian", 2.0)


def test_bump_compact(h3):
    f = bump(h3, 2.0)
    assert f.r_max == 2.0 and f(0.0) == pytest.approx(1.0)
    assert f(np.array([2.5]))[0] == 0.0


def test_from_samples(h3, pdata3):
    r = np.linspace(0.0, 12.0, 400)
    f = from_samples(h3, r, np.exp(-r * r), "gaussian", 1.0)
    assert lp_norm(h3, f, 2.0) == pytest.approx(lp_norm(h3, gaussian(h3, 1.0), 2.0), rel=1e-6)
    with pytest.raises(ValueError):
        from_samples(h3, [0.0, 2.0, 1.0, 3.0], [1.0, 1.0, 1.0, 1.0])


def test_refine_check(h3):
    vals, change, level = refine_check(h3, gaussian(h3, 1.0), [0.5, 2.0])
    assert change < 1e-9 and level >= 1
    assert np.allclose(vals, h3_gaussian_transform(1.0, [0.5, 2.0]), rtol=1e-9)


def test_inverse_needs_calibration(h3, pdata3):
    import dataclasses

    raw = dataclasses.replace(pdata3, C0=float("nan"))
    with pytest.raises(ValueError):
        inverse_ft(raw, spherical_ft(h3, gaussian(h3, 1.0), pdata3))


def test_line_ft_oracle():
    t = 0.4
    g = line_grid(12.0)
    from rankone.transforms import LineFunction

    lf = LineFunction(g, g.nodes, np.exp(-g.nodes**2 / (4 * t)))
    lam = np.array([0.0, 1.0, 3.0])
    assert np.allclose(euclidean_ft(lf, lam), line_gaussian_ft(t, lam), rtol=1e-12)


def test_convolution_associative(h3, pdata3):
    f, g, h = gaussian(h3, 1.0), gaussian(h3, 2.0), gaussian(h3, 3.0)
    r = radial_grid(6.0)
    left = convolve_radial(pdata3, convolve_radial(pdata3, f, g), h, r).values
    right = convolve_radial(pdata3, f, convolve_radial(pdata3, g, h), r).values
    assert np.max(np.abs(left - right)) <= 1e-6 * np.abs(left).max()
