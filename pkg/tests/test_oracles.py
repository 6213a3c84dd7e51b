import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from rankone import oracles


def test_h3_density_is_lambda_squared():
    lam = np.array([0.1, 1.0, 7.5])
    assert np.allclose(oracles.hyperbolic_plancherel_density(3, lam), lam**2, rtol=1e-13)


def test_h5_density_rational():
    lam = np.array([0.1, 1.0, 7.5])
    ref = lam**2 * (lam**2 + 1.0) / 36.0
    assert np.allclose(oracles.hyperbolic_plancherel_density(5, lam), ref, rtol=1e-13)


@given(st.floats(0.01, 30.0))
def test_dr01_matches_h2(lam):
    assert oracles.damek_ricci_plancherel_density(0, 1, lam) == pytest.approx(
        float(oracles.hyperbolic_plancherel_density(2, lam)), rel=1e-12
    )


@given(st.integers(1, 4), st.integers(1, 4))
def test_dr_density_polynomial_growth(m, k):
    # |c|^{-2} grows like lambda^{n-1}
    n = m + k + 1
    d1, d2 = oracles.damek_ricci_plancherel_density(m, k, [200.0, 400.0])
    assert math.log(d2 / d1) / math.log(2.0) == pytest.approx(n - 1, abs=0.01)


@pytest.mark.parametrize("t", [0.1, 0.7, 2.0])
def test_h3_heat_mass(t):
    mass, _ = quad(lambda r: oracles.h3_heat_kernel(t, r) * 4 * math.pi * math.sinh(r) ** 2, 0, 40 + 20 * t, limit=200)
    assert mass == pytest.approx(1.0, rel=1e-10)


@pytest.mark.parametrize("t", [0.1, 0.7, 2.0])
def test_h5_heat_mass(t):
    omega4 = 8.0 * math.pi**2 / 3.0
    mass, _ = quad(lambda r: oracles.h5_heat_kernel(t, r) * omega4 * math.sinh(r) ** 4, 0, 40 + 30 * t, limit=200)
    assert mass == pytest.approx(1.0, rel=1e-10)


def test_h5_heat_small_r_branch_continuous():
    t = 0.5
    lo, hi = oracles.h5_heat_kernel(t, [0.999e-3, 1.001e-3])
    assert lo == pytest.approx(hi, rel=1e-6)


@given(st.floats(0.2, 3.0), st.floats(0.0, 6.0))
def test_h3_gaussian_transform_by_quadrature(a, lam):
    def f(r):
        return math.exp(-a * r * r) * oracles.h3_phi(lam, r).real * 4 * math.pi * math.sinh(r) ** 2

    val, _ = quad(f, 0, 1.0 / a + math.sqrt(60.0 / a), limit=400, epsabs=1e-12)
    assert float(oracles.h3_gaussian_transform(a, lam)) == pytest.approx(val, rel=1e-8, abs=1e-10)


def test_h3_phi_limits():
    assert oracles.h3_phi(2.0, 0.0) == 1.0
    assert oracles.h3_phi(0.0, 1.0).real == pytest.approx(1.0 / math.sinh(1.0))
    # imaginary lambda = i rho gives the constant function
    assert np.allclose(oracles.h3_phi(1j, [0.5, 3.0]), 1.0)


def test_line_gaussian_ft_matches_quadrature():
    t, lam = 0.3, 1.7
    val, _ = quad(lambda s: math.cos(lam * s) * math.exp(-s * s / (4 * t)), -30, 30)
    assert oracles.line_gaussian_ft(t, lam) == pytest.approx(val, rel=1e-12)


def test_line_heat_abel_mass():
    val, _ = quad(lambda s: oracles.line_heat_abel(0.5, 1.0, s), -40, 40)
    assert val == pytest.approx(math.exp(-0.5), rel=1e-12)


def test_line_schrodinger_rate_limits():
    assert oracles.line_schrodinger_rate(1.0, 0.0) == 1.0
    assert oracles.line_schrodinger_rate(1.0, 1.0) == pytest.approx(1.0 / 17.0)
