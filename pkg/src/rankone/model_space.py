"""
Concrete rank-one model geometries.

A model space is fully described by its volume density ``A(r)`` in geodesic
polar coordinates.  Everything downstream (eigenfunctions, c-function,
transforms) only touches the density through the handful of functions in
this module, so adding a new family means adding one branch here.

Two families are provided:

* real hyperbolic space ``H^n`` with curvature -1, ``A(r) = sinh^{n-1}(r)``;
* Damek-Ricci spaces ``S(m, k)`` with
  ``A(r) = 2^{m+k} sinh^{m+k}(r/2) cosh^k(r/2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.special import gammaln

__all__ = [
    "SpaceKind",
    "ModelSpace",
    "hyperbolic_space",
    "damek_ricci_space",
    "density_at",
    "log_density",
    "log_derivative_at",
    "liouville_potential",
    "space_from_config",
]

# above this radius everything is evaluated through logarithms
_LOG_SWITCH = 20.0


class SpaceKind(str, Enum):
    HYPERBOLIC = "hyperbolic"
    DAMEK_RICCI = "damek-ricci"


@dataclass(frozen=True)
class ModelSpace:
    """Immutable description of a rank-one model geometry.

    Attributes
    ----------
    kind : SpaceKind
        Family of the space.
    n : int
        Real dimension.
    rho : float
        Half the mean curvature of horospheres; ``A(r) ~ e^{2 rho r}``.
    alpha : float
        ``(n - 2) / 2``; ``A(r) ~ r^{2 alpha + 1}`` near the origin.
    omega : float
        Volume of the unit sphere ``S^{n-1}``.
    m, k : int
        Damek-Ricci parameters (``m = n - 1``, ``k = 0`` for hyperbolic
        spaces; they are only used to evaluate the density).
    oracle_flags : frozenset of str
        Closed forms available in :mod:`rankone.oracles`.
    """

    kind: SpaceKind
    n: int
    rho: float
    alpha: float
    omega: float
    m: int = 0
    k: int = 0
    oracle_flags: frozenset = field(default_factory=frozenset)

    @property
    def label(self) -> str:
        if self.kind is SpaceKind.HYPERBOLIC:
            return f"H{self.n}"
        return f"DR({self.m},{self.k})"

    def descriptor(self) -> dict:
        return {
            "kind": self.kind.value,
            "n": self.n,
            "m": self.m,
            "k": self.k,
            "rho": self.rho,
            "alpha": self.alpha,
            "omega": self.omega,
        }

    # Odd Laurent coefficients of A'/A = (2 alpha + 1)/r + b1 r + b2 r^3 + b3 r^5 + ...
    @property
    def log_derivative_series(self) -> tuple[float, float, float]:
        if self.kind is SpaceKind.HYPERBOLIC:
            s = self.n - 1
            return (s / 3.0, -s / 45.0, 2.0 * s / 945.0)
        s, k = self.m + self.k, self.k
        return (s / 12.0 + k / 4.0, -s / 720.0 - k / 48.0, s / 30240.0 + k / 480.0)


def _sphere_volume(n: int) -> float:
    # vol(S^{n-1}) = 2 pi^{n/2} / Gamma(n/2)
    return float(np.exp(math.log(2.0) + 0.5 * n * math.log(math.pi) - gammaln(0.5 * n)))


def hyperbolic_space(n: int) -> ModelSpace:
    """Real hyperbolic space of dimension ``n`` and curvature -1."""
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise TypeError(f"dimension must be an integer, got {n!r}")
    if n < 2:
        raise ValueError(f"hyperbolic space needs n >= 2, got {n}")
    n = int(n)
    flags = {"c_function"}
    if n == 3:
        flags |= {"eigenfunction", "heat_kernel"}
    if n == 5:
        flags |= {"heat_kernel"}
    return ModelSpace(
        kind=SpaceKind.HYPERBOLIC,
        n=n,
        rho=0.5 * (n - 1),
        alpha=0.5 * (n - 2),
        omega=_sphere_volume(n),
        m=n - 1,
        k=0,
        oracle_flags=frozenset(flags),
    )


def damek_ricci_space(m: int, k: int) -> ModelSpace:
    """Damek-Ricci space with ``dim v = m`` and ``dim z = k``."""
    for name, val in (("m", m), ("k", k)):
        if not isinstance(val, (int, np.integer)) or isinstance(val, bool):
            raise TypeError(f"{name} must be an integer, got {val!r}")
    if m < 0 or k < 1:
        raise ValueError(f"Damek-Ricci parameters need m >= 0 and k >= 1, got ({m}, {k})")
    m, k = int(m), int(k)
    n = m + k + 1
    return ModelSpace(
        kind=SpaceKind.DAMEK_RICCI,
        n=n,
        rho=0.25 * (m + 2 * k),
        alpha=0.5 * (n - 2),
        omega=_sphere_volume(n),
        m=m,
        k=k,
        oracle_flags=frozenset(),
    )


def _log_sinh(x):
    x = np.asarray(x, dtype=float)
    big = x > _LOG_SWITCH
    small = np.where(big, 1.0, x)
    with np.errstate(divide="ignore"):
        out = np.where(big, x - math.log(2.0) + np.log1p(-np.exp(-2.0 * x)), np.log(np.sinh(small)))
    return out


def _log_cosh(x):
    x = np.asarray(x, dtype=float)
    return x - math.log(2.0) + np.log1p(np.exp(-2.0 * x))


def _check_radius(r, strict=False):
    r = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(r)):
        raise ValueError("radius must be finite")
    if strict and np.any(r <= 0):
        raise ValueError("radius must be strictly positive")
    if np.any(r < 0):
        raise ValueError("radius must be non-negative")
    return r


def log_density(space: ModelSpace, r):
    """``log A(r)``; ``-inf`` at the origin."""
    r = _check_radius(r)
    if space.kind is SpaceKind.HYPERBOLIC:
        return (space.n - 1) * _log_sinh(r)
    s, k = space.m + space.k, space.k
    return s * (math.log(2.0) + _log_sinh(0.5 * r)) + k * _log_cosh(0.5 * r)


def density_at(space: ModelSpace, r):
    """Volume density ``A(r)``.

    Returns a float for scalar input, an array otherwise.
    """
    r = _check_radius(r)
    with np.errstate(over="ignore"):
        out = np.exp(log_density(space, r))
    return float(out) if out.ndim == 0 else out


def log_derivative_at(space: ModelSpace, r):
    """``A'(r) / A(r)`` evaluated without forming ``A``."""
    r = _check_radius(r, strict=True)
    if space.kind is SpaceKind.HYPERBOLIC:
        out = (space.n - 1) / np.tanh(r)
    else:
        s, k = space.m + space.k, space.k
        h = 0.5 * r
        out = 0.5 * s / np.tanh(h) + 0.5 * k * np.tanh(h)
    return float(out) if np.ndim(out) == 0 else out


def liouville_potential(space: ModelSpace, r):
    """Potential ``q`` of the Liouville normal form.

    With ``psi = sqrt(A) phi`` the radial eigen-equation
    ``phi'' + (A'/A) phi' = -(lambda^2 + rho^2) phi`` becomes
    ``psi'' = (q(r) - lambda^2) psi`` where
    ``q = (A'/A)'/2 + (A'/A)^2/4 - rho^2``.  ``q`` decays like ``e^{-2r}``.
    """
    r = np.asarray(r, dtype=float)
    with np.errstate(over="ignore"):
        if space.kind is SpaceKind.HYPERBOLIC:
            rho = space.rho
            return rho * (rho - 1.0) / np.sinh(r) ** 2
        return _dr_potential(space, r)


def _dr_potential(space, r):
    s, k = space.m + space.k, space.k
    h = 0.5 * r
    dlog = -0.25 * s / np.sinh(h) ** 2 + 0.25 * k / np.cosh(h) ** 2
    # L/2 - rho and L/2 + rho written to avoid cancellation at large r
    em1 = np.expm1(r)
    lower = 0.5 * s / em1 - 0.5 * k / (em1 + 2.0)
    upper = lower + 2.0 * space.rho
    return 0.5 * dlog + lower * upper


def space_from_config(cfg: dict) -> ModelSpace:
    """Build a space from dotted config keys (``space.kind``, ``space.n`` ...)."""
    kind = str(cfg.get("space.kind", "hyperbolic")).lower()
    if kind == SpaceKind.HYPERBOLIC.value:
        return hyperbolic_space(int(cfg.get("space.n", 3)))
    if kind == SpaceKind.DAMEK_RICCI.value:
        return damek_ricci_space(int(cfg.get("space.m", 0)), int(cfg.get("space.k", 1)))
    raise ValueError(f"unknown space.kind {kind!r}")
