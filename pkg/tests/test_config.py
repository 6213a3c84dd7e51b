import pytest
from hypothesis import given
from hypothesis import strategies as st

from rankone.config import OUTPUT_ENV, Config, ConfigError, load_config, parse_config_text, parse_value
from rankone.model_space import damek_ricci_space, hyperbolic_space


@pytest.mark.parametrize("text, value", [("3", 3), ("2.5", 2.5), ("1e-8", 1e-8), ("true", True),
                                         ("False", False), ("'x y'", "x y"), ("hyperbolic", "hyperbolic")])
def test_parse_value(text, value):
    out = parse_value(text)
    assert out == value and type(out) is type(value)


@given(st.integers(-10**6, 10**6))
def test_parse_value_int_roundtrip(n):
    assert parse_value(f" {n} ") == n


def test_parse_config_text():
    text = "# header\nspace.kind = damek-ricci  # trailing\n\nspace.m=2\n"
    assert parse_config_text(text) == {"space.kind": "damek-ricci", "space.m": 2}
    with pytest.raises(ConfigError, match="line 1"):
        parse_config_text("space.n 3")
    with pytest.raises(ConfigError):
        parse_config_text("= 3")


def test_defaults():
    cfg = load_config(environ={})
    assert cfg.space() == hyperbolic_space(3)
    assert cfg["grid.lambda_max"] == 60.0
    assert str(cfg.output_dir) == "rankone-out"


def test_precedence(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("space.n = 5\noutput.dir = from-file\ngrid.lambda_max = 80\n")
    cfg = load_config(path, environ={})
    assert cfg.space() == hyperbolic_space(5) and str(cfg.output_dir) == "from-file"
    cfg = load_config(path, environ={OUTPUT_ENV: "from-env"})
    assert str(cfg.output_dir) == "from-env"
    cfg = load_config(path, {"output.dir": "from-flag", "space.n": 4}, environ={OUTPUT_ENV: "from-env"})
    assert str(cfg.output_dir) == "from-flag" and cfg.space() == hyperbolic_space(4)
    assert cfg["grid.lambda_max"] == 80.0


def test_damek_ricci_config():
    cfg = load_config(flags={"space.kind": "Damek-Ricci", "space.m": 1, "space.k": 2}, environ={})
    assert cfg.space() == damek_ricci_space(1, 2)


def test_tolerance_overrides():
    cfg = load_config(flags={"verify.tolerance_overrides.young.slack": 1e-5}, known_checks=("young",), environ={})
    assert cfg.tolerance_overrides == {"young": {"slack": 1e-5}}
    with pytest.raises(ConfigError, match="unknown checks"):
        load_config(flags={"verify.tolerance_overrides.nope.x": 1}, known_checks=("young",), environ={})
    with pytest.raises(ConfigError):
        Config().update({"verify.tolerance_overrides.young": 1})


@pytest.mark.parametrize("flags", [
    {"space.kind": "spherical"},
    {"space.n": 2.5},
    {"space.n": 1},
    {"grid.lambda_max": 5},
    {"grid.points_per_panel": 0},
    {"ode.tolerance": -1.0},
    {"output.format": "xml"},
    {"no.such.key": 1},
    {"space.kind": "damek-ricci", "space.k": 0},
])
def test_invalid(flags):
    with pytest.raises(ConfigError):
        load_config(flags=flags, environ={})


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.cfg", environ={})
