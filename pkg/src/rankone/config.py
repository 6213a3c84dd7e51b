"""
Run configuration: dotted keys from a plain-text file, overridden by flags.

File syntax, one entry per line::

    # comment
    space.kind = hyperbolic
    space.n = 5
    grid.lambda_max = 80
    verify.tolerance_overrides.young.slack = 1e-5

Precedence is defaults < file < ``RANKONE_OUTPUT_DIR`` (for ``output.dir``)
< command-line flags.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from .model_space import ModelSpace, SpaceKind, space_from_config

__all__ = ["ConfigError", "Config", "OUTPUT_ENV", "parse_value", "parse_config_text", "load_config"]

OUTPUT_ENV = "RANKONE_OUTPUT_DIR"
FORMATS = ("csv", "json", "both")
_OVERRIDE_PREFIX = "verify.tolerance_overrides."

DEFAULTS = {
    "space.kind": "hyperbolic",
    "space.n": 3,
    "space.m": 0,
    "space.k": 1,
    "grid.r_max": None,
    "grid.points_per_panel": 32,
    "grid.lambda_max": 60.0,
    "grid.lambda_points": 600,
    "grid.s_max": 8.0,
    "ode.tolerance": 1e-10,
    "output.dir": "rankone-out",
    "output.format": "both",
}


class ConfigError(ValueError):
    """Malformed config file, unknown key or invalid value."""


def parse_value(text: str):
    """Integer, float, boolean or (optionally quoted) string."""
    text = text.strip()
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "'\"":
        return text[1:-1]
    return text


def parse_config_text(text: str) -> dict:
    """Flat ``{dotted_key: value}`` from config file contents."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[key] = parse_value(value)
    return out


@dataclass
class Config:
    """Validated run configuration.

    Attributes
    ----------
    values : dict
        Flat dotted keys (see ``DEFAULTS``).
    tolerance_overrides : dict
        ``{check_name: {parameter: value}}`` passed to the verifiers.
    """

    values: dict = field(default_factory=lambda: dict(DEFAULTS))
    tolerance_overrides: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def space(self) -> ModelSpace:
        return space_from_config(self.values)

    @property
    def output_dir(self) -> Path:
        return Path(self.values["output.dir"])

    def update(self, entries: dict) -> "Config":
        """Merge dotted entries, validating keys; returns ``self``."""
        for key, value in entries.items():
            if value is None:
                continue
            if key.startswith(_OVERRIDE_PREFIX):
                rest = key[len(_OVERRIDE_PREFIX):]
                check, _, param = rest.partition(".")
                if not param:
                    raise ConfigError(f"{key}: expected {_OVERRIDE_PREFIX}<check>.<parameter>")
                self.tolerance_overrides.setdefault(check, {})[param] = value
            elif key in DEFAULTS:
                self.values[key] = value
            else:
                raise ConfigError(f"unknown config key {key!r}")
        return self

    def validate(self, known_checks=()) -> "Config":
        v = self.values
        kind = str(v["space.kind"]).lower()
        if kind not in {k.value for k in SpaceKind}:
            raise ConfigError(f"space.kind must be one of {[k.value for k in SpaceKind]}")
        v["space.kind"] = kind
        for key in ("space.n", "space.m", "space.k", "grid.points_per_panel", "grid.lambda_points"):
            if not isinstance(v[key], int) or isinstance(v[key], bool):
                raise ConfigError(f"{key} must be an integer")
        for key in ("grid.points_per_panel", "grid.lambda_points"):
            if v[key] <= 0:
                raise ConfigError(f"{key} must be positive")
        for key in ("grid.r_max", "grid.lambda_max", "grid.s_max", "ode.tolerance"):
            val = v[key]
            if val is None and key == "grid.r_max":
                continue
            if not isinstance(val, (int, float)) or isinstance(val, bool) or not val > 0:
                raise ConfigError(f"{key} must be a positive number")
            v[key] = float(val)
        if v["grid.lambda_max"] < 10:
            raise ConfigError("grid.lambda_max must be at least 10")
        if v["output.format"] not in FORMATS:
            raise ConfigError(f"output.format must be one of {FORMATS}")
        if known_checks:
            unknown = sorted(set(self.tolerance_overrides) - set(known_checks))
            if unknown:
                raise ConfigError(f"tolerance overrides for unknown checks: {unknown}")
        try:
            self.space()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self


def load_config(path=None, flags: dict | None = None, known_checks=(), environ=None) -> Config:
    """Defaults, then the file at ``path``, then the environment, then ``flags``."""
    cfg = Config()
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        cfg.update(parse_config_text(text))
    env = os.environ if environ is None else environ
    if env.get(OUTPUT_ENV):
        cfg.update({"output.dir": env[OUTPUT_ENV]})
    cfg.update(flags or {})
    return cfg.validate(known_checks)
