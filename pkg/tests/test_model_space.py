import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rankone.model_space import (
    SpaceKind,
    damek_ricci_space,
    density_at,
    hyperbolic_space,
    liouville_potential,
    log_density,
    log_derivative_at,
    space_from_config,
)

spaces = st.one_of(
    st.integers(2, 9).map(hyperbolic_space),
    st.tuples(st.integers(0, 6), st.integers(1, 5)).map(lambda mk: damek_ricci_space(*mk)),
)


def test_hyperbolic_constants():
    h = hyperbolic_space(3)
    assert h.kind is SpaceKind.HYPERBOLIC
    assert (h.rho, h.alpha, h.label) == (1.0, 0.5, "H3")
    assert h.omega == pytest.approx(4.0 * math.pi, rel=1e-15)
    assert hyperbolic_space(2).omega == pytest.approx(2.0 * math.pi, rel=1e-15)


def test_damek_ricci_constants():
    d = damek_ricci_space(2, 3)
    assert d.n == 6
    assert d.rho == pytest.approx(2.0)
    assert d.alpha == pytest.approx(2.0)
    assert d.label == "DR(2,3)"


def test_hyperbolic_density_closed_form():
    r = np.array([0.1, 1.0, 3.0, 10.0])
    assert np.allclose(density_at(hyperbolic_space(4), r), np.sinh(r) ** 3, rtol=1e-14)


def test_damek_ricci_density_closed_form():
    r = np.array([0.1, 1.0, 3.0, 10.0])
    m, k = 2, 3
    ref = 2.0 ** (m + k) * np.sinh(r / 2) ** (m + k) * np.cosh(r / 2) ** k
    assert np.allclose(density_at(damek_ricci_space(m, k), r), ref, rtol=1e-13)


def test_dr01_is_h2():
    r = np.linspace(0.01, 30.0, 50)
    assert np.allclose(density_at(damek_ricci_space(0, 1), r), density_at(hyperbolic_space(2), r), rtol=1e-13)
    assert damek_ricci_space(0, 1).rho == hyperbolic_space(2).rho


def test_density_scalar_and_origin():
    assert isinstance(density_at(hyperbolic_space(3), 1.0), float)
    assert density_at(hyperbolic_space(3), 0.0) == 0.0
    assert log_density(hyperbolic_space(3), 0.0) == -math.inf


def test_large_radius_finite_log():
    assert np.isfinite(log_density(hyperbolic_space(9), 2000.0))


@pytest.mark.parametrize("bad", [-1.0, math.nan, math.inf])
def test_density_rejects_bad_radius(bad):
    with pytest.raises(ValueError):
        density_at(hyperbolic_space(3), bad)


def test_log_derivative_needs_positive_radius():
    with pytest.raises(ValueError):
        log_derivative_at(hyperbolic_space(3), 0.0)


@pytest.mark.parametrize("args", [(1,), (0,)])
def test_hyperbolic_rejects_small_dimension(args):
    with pytest.raises(ValueError):
        hyperbolic_space(*args)


def test_constructors_reject_non_integers():
    with pytest.raises(TypeError):
        hyperbolic_space(3.0)
    with pytest.raises(TypeError):
        damek_ricci_space(1, True)
    with pytest.raises(ValueError):
        damek_ricci_space(1, 0)


def test_space_from_config():
    assert space_from_config({"space.kind": "hyperbolic", "space.n": 5}) == hyperbolic_space(5)
    assert space_from_config({"space.kind": "damek-ricci", "space.m": 2, "space.k": 1}) == damek_ricci_space(2, 1)
    with pytest.raises(ValueError):
        space_from_config({"space.kind": "spherical"})


@given(spaces, st.floats(25.0, 200.0))
def test_log_derivative_tends_to_two_rho(space, r):
    assert log_derivative_at(space, r) == pytest.approx(2.0 * space.rho, abs=1e-9)


@given(spaces, st.floats(1e-4, 1e-2))
def test_log_derivative_small_r_series(space, r):
    b1, b2, _ = space.log_derivative_series
    series = (2.0 * space.alpha + 1.0) / r + b1 * r + b2 * r**3
    assert log_derivative_at(space, r) == pytest.approx(series, rel=1e-12)


@given(spaces, st.floats(0.05, 40.0))
def test_log_derivative_matches_density(space, r):
    h = 1e-5 * max(r, 1.0)
    fd = (log_density(space, r + h) - log_density(space, r - h)) / (2.0 * h)
    assert log_derivative_at(space, r) == pytest.approx(fd, rel=1e-7)


@given(spaces, st.floats(1.0, 300.0))
def test_purely_exponential_growth(space, r):
    ratio = math.exp(log_density(space, r) - 2.0 * space.rho * r)
    lo = math.exp(log_density(space, 1.0) - 2.0 * space.rho)
    assert lo * 0.999 <= ratio <= 2.0 ** (2 * space.rho + space.k + 1)


@given(spaces, st.floats(0.05, 20.0))
def test_liouville_potential_identity(space, r):
    h = 1e-4 * min(r, 1.0)
    dL = (log_derivative_at(space, r + h) - log_derivative_at(space, r - h)) / (2.0 * h)
    q = 0.5 * dL + 0.25 * log_derivative_at(space, r) ** 2 - space.rho**2
    assert float(liouville_potential(space, r)) == pytest.approx(q, rel=1e-6, abs=1e-9)


@given(spaces)
def test_liouville_potential_decays(space):
    q = liouville_potential(space, np.array([30.0, 60.0]))
    assert abs(q[0]) < 1e-9 * max(1.0, space.rho**2)
    assert abs(q[1]) < 1e-20 * max(1.0, space.rho**2)
