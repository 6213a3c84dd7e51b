import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rankone.model_space import damek_ricci_space, hyperbolic_space
from rankone.oracles import (
    damek_ricci_c_function,
    damek_ricci_plancherel_density,
    h3_plancherel_constant,
    hyperbolic_c_function,
    hyperbolic_plancherel_density,
)
from rankone.spectral_measure import (
    LAMBDA_MIN,
    CalibrationError,
    ExtractionError,
    calibrate_C0,
    extract_c,
    extract_c_batch,
    heat_calibration,
    plancherel_density,
)


@pytest.mark.parametrize("lam", [0.05, 0.4, 3.0, 25.0])
def test_extract_c_h3(h3, lam):
    c = extract_c(h3, lam)
    assert c == pytest.approx(complex(hyperbolic_c_function(3, lam)), rel=1e-8)


def test_extract_c_dr(dr11):
    lam = np.array([0.1, 1.0, 9.0])
    assert np.allclose(extract_c_batch(dr11, lam), damek_ricci_c_function(1, 1, lam), rtol=1e-8)


def test_extract_below_lambda_min(h3):
    with pytest.raises(ValueError, match="LAMBDA_MIN"):
        extract_c(h3, 0.01)
    with pytest.raises(ValueError):
        extract_c(h3, 1j)


def test_extraction_error_when_radius_too_small(h3):
    with pytest.raises(ExtractionError):
        extract_c_batch(h3, [0.05], R=2.0, tol=1e-12, escalate=False)


def test_extraction_diagnostics(h3):
    diag = {}
    extract_c_batch(h3, [0.5, 2.0], diagnostics=diag)
    assert diag["stability"].shape == (2,)
    assert np.all(diag["radius"] >= 35.0)


@given(st.floats(0.0, 60.0))
def test_h3_density(lam):
    from rankone.spectral_measure import build_plancherel

    pdata = build_plancherel(hyperbolic_space(3))
    assert float(pdata.density(lam)) == pytest.approx(lam * lam, rel=1e-7, abs=1e-12)


def test_h5_density(pdata5):
    lam = np.linspace(0.01, 60.0, 301)
    ref = hyperbolic_plancherel_density(5, lam)
    assert np.max(np.abs(pdata5.density(lam) / ref - 1.0)) < 1e-7


def test_dr_density(pdata_dr):
    lam = np.linspace(0.001, 60.0, 301)
    ref = damek_ricci_plancherel_density(1, 1, lam)
    assert np.max(np.abs(pdata_dr.density(lam) / ref - 1.0)) < 1e-7


def test_density_vanishes_quadratically(pdata3, pdata_dr):
    assert pdata3.kappa == pytest.approx(1.0, rel=1e-8)
    assert pdata3.density(0.0) == 0.0
    ref = damek_ricci_plancherel_density(1, 1, 1e-4) / 1e-8
    assert pdata_dr.kappa == pytest.approx(ref, rel=1e-6)


def test_density_even(pdata3):
    lam = np.array([0.02, 1.3, 17.0])
    assert np.array_equal(pdata3.density(lam), pdata3.density(-lam))


def test_calibrated_constant(pdata3, pdata5):
    assert pdata3.C0 == pytest.approx(h3_plancherel_constant(), rel=1e-8)
    assert pdata3.calibration_residual < 1e-8
    # 2^{n-2} / (pi omega) on H^n
    assert pdata5.C0 == pytest.approx(8.0 / (math.pi * pdata5.space.omega), rel=1e-8)
    assert np.allclose(heat_calibration(pdata5), pdata5.C0, rtol=1e-6)


def test_dr01_constant_matches_h2():
    a = calibrate_C0(damek_ricci_space(0, 1), plancherel_density(damek_ricci_space(0, 1)))
    b = calibrate_C0(hyperbolic_space(2), plancherel_density(hyperbolic_space(2)))
    assert a.C0 == pytest.approx(b.C0, rel=1e-9)


def test_heat_calibration_agrees(pdata3):
    vals = heat_calibration(pdata3)
    assert np.allclose(vals, pdata3.C0, rtol=1e-7)


def test_calibration_needs_three_functions(h3, pdata3):
    with pytest.raises(ValueError):
        calibrate_C0(h3, pdata3, test_functions=(1.0, 2.0))


def test_calibration_spread_detected(h3):
    crude = plancherel_density(h3, lam_max=10.0)
    with pytest.raises(CalibrationError):
        calibrate_C0(h3, crude, test_functions=(0.5, 1.0, 40.0), max_spread=1e-12)


def test_extension_independent_of_history(h3):
    a = plancherel_density(h3, lam_max=20.0)
    b = plancherel_density(h3, lam_max=20.0)
    a.extend(45.0)
    b.extend(30.0)
    b.extend(45.0)
    lam = np.linspace(0.0, 45.0, 97)
    assert np.array_equal(a.density(lam), b.density(lam))
    assert a.lambda_max >= 45.0


def test_requested_grid_is_reported(h3):
    grid = [0.0, 0.01, 1.0, 70.0]
    pdata = plancherel_density(h3, lambda_grid=grid)
    assert np.allclose(pdata.density_values, np.square(grid), rtol=1e-7, atol=1e-12)
    assert pdata.lambda_max >= 70.0
    assert math.isnan(pdata.C0)


@pytest.mark.parametrize("kw", [{"lam_max": 5.0}, {"lambda_grid": [-1.0]}, {"lambda_grid": [math.nan]}])
def test_plancherel_input_errors(h3, kw):
    with pytest.raises(ValueError):
        plancherel_density(h3, **kw)


def test_quadrature_anchored(pdata3):
    g = pdata3.quadrature(12.0)
    assert LAMBDA_MIN in g.breaks and g.breaks[-1] == 12.0


def test_header(pdata3):
    h = pdata3.header()
    assert h["lambda_min"] == LAMBDA_MIN and h["C0"] == pdata3.C0


@pytest.mark.parametrize("fixture", ["pdata3", "pdata5", "pdata_dr"])
def test_density_exponents(request, fixture):
    pdata = request.getfixturevalue(fixture)
    small = np.geomspace(0.05, 0.2, 12)
    large = np.geomspace(20.0, 50.0, 12)
    s0 = np.polyfit(np.log(small), np.log(pdata.density(small)), 1)[0]
    s1 = np.polyfit(np.log(large), np.log(pdata.density(large)), 1)[0]
    assert 1.9 <= s0 <= 2.1
    assert 2 * pdata.space.alpha + 0.9 <= s1 <= 2 * pdata.space.alpha + 1.1
