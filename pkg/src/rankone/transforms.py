"""
Spherical Fourier transform, inversion, norms, convolution and Abel transform
for radial functions.

Conventions
-----------
``f_hat(lambda) = omega int_0^inf u(r) phi_lambda(r) A(r) dr``

``u(r) = C0 int_0^inf f_hat(lambda) phi_lambda(r) |c(lambda)|^{-2} d lambda``

The Abel transform is obtained from ``f_hat`` with the Euclidean inverse
transform on the line, ``Rf(s) = (1/2 pi) int f_hat(lambda) e^{i lambda s}
d lambda``, which is the horosphere integral ``e^{-rho s} int_{H^s} f`` for
radial ``f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .eigenfunctions import DEFAULT_TOL, phi_table
from .model_space import ModelSpace, density_at
from .quadrature import PanelGrid, fixed_sum, panel_breaks, panel_grid
from .spectral_measure import LAMBDA_MIN, PlancherelData

__all__ = [
    "DECAY_HINTS",
    "TransformError",
    "RadialFunction",
    "SpectralFunction",
    "LineFunction",
    "radial_grid",
    "line_grid",
    "radius_for",
    "tail_ratio",
    "from_callable",
    "from_samples",
    "gaussian",
    "bump",
    "spherical_ft",
    "inverse_ft",
    "lp_norm",
    "spectral_l2",
    "weighted_l2",
    "convolve_radial",
    "abel_transform",
    "euclidean_ft",
    "inverse_euclidean_ft",
    "refine_check",
]

DECAY_HINTS = ("gaussian", "exponential", "compact", "unknown")
RADIAL_ORDER = 32
SPECTRAL_ORDER = 16
# e^{-37} ~ 1e-16: spectral and radial truncation points for Gaussian decay
_GAUSS_LOG_CUT = 37.0
_TAIL_REL = 1e-18
# largest last-panel share of a norm integral before it is flagged
TAIL_BUDGET = 1e-6


class TransformError(RuntimeError):
    """Truncation or quadrature budget violated."""


@dataclass
class RadialFunction:
    """Radial function sampled on a Gauss-Legendre grid.

    Attributes
    ----------
    space : ModelSpace
    grid : PanelGrid or None
        Quadrature grid; ``None`` for bare point samples (no norms).
    r : ndarray
        Sample radii (``grid.nodes`` when a grid is present).
    values : ndarray
    decay_hint : str
        One of ``gaussian``, ``exponential``, ``compact``, ``unknown``.
    rate : float or None
        Gaussian rate ``a`` of ``e^{-a r^2}``, exponential rate, or support
        radius, according to ``decay_hint``.
    source : callable or None
        ``r -> u(r)``; lets the function be re-sampled on other grids.
    """

    space: ModelSpace
    grid: PanelGrid | None
    r: np.ndarray
    values: np.ndarray
    decay_hint: str = "unknown"
    rate: float | None = None
    source: Callable | None = field(default=None, repr=False)
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.decay_hint not in DECAY_HINTS:
            raise ValueError(f"unknown decay hint {self.decay_hint!r}")
        self.values = np.asarray(self.values)
        if self.values.shape != self.r.shape:
            raise ValueError("values and radii differ in shape")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("radial function has non-finite samples")

    @property
    def r_max(self) -> float:
        return float(self.grid.breaks[-1]) if self.grid is not None else float(self.r[-1])

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.source is not None:
            return np.asarray(self.source(r))
        if self.grid is None:
            raise ValueError("point samples cannot be evaluated elsewhere")
        inside = r <= self.r_max
        out = np.zeros(r.shape, dtype=self.values.dtype)
        out[inside] = self.grid.interpolate(self.values, r[inside])
        return out

    def on_grid(self, grid: PanelGrid) -> "RadialFunction":
        return RadialFunction(self.space, grid, grid.nodes, self(grid.nodes), self.decay_hint,
                              self.rate, self.source, dict(self.meta))

    def scaled(self, factor) -> "RadialFunction":
        src = self.source
        return RadialFunction(self.space, self.grid, self.r, factor * self.values, self.decay_hint,
                              self.rate, None if src is None else (lambda r: factor * src(r)),
                              dict(self.meta))

    def is_zero(self) -> bool:
        return not np.any(self.values)


@dataclass
class SpectralFunction:
    """Function of ``lambda >= 0``; ``grid`` carries quadrature weights when present."""

    space: ModelSpace
    grid: PanelGrid | None
    lam: np.ndarray
    values: np.ndarray
    source: Callable | None = field(default=None, repr=False)
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("spectral function has non-finite samples")

    @property
    def lam_top(self) -> float:
        return float(self.meta.get("lam_top", self.lam[-1] if self.lam.size else 0.0))

    def integrate(self, values):
        if self.grid is None:
            raise ValueError("spectral samples carry no quadrature weights")
        return self.grid.integrate(values)

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        if self.source is not None:
            return np.asarray(self.source(lam))
        if self.grid is None:
            raise ValueError("point samples cannot be evaluated elsewhere")
        return self.grid.interpolate(self.values, lam)


@dataclass
class LineFunction:
    """Function on ``[-s_max, s_max]``."""

    grid: PanelGrid | None
    s: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict, repr=False)


def radial_grid(r_max: float, width: float = 0.5, order: int = RADIAL_ORDER) -> PanelGrid:
    """Gauss-Legendre panels on ``[0, r_max]``."""
    if not r_max > 0:
        raise ValueError("r_max must be positive")
    return panel_grid(panel_breaks(0.0, r_max, width), order)


def line_grid(s_max: float, width: float = 0.5, order: int = RADIAL_ORDER) -> PanelGrid:
    """Panels on ``[-s_max, s_max]``, mirror-symmetric node for node."""
    half = panel_breaks(0.0, s_max, width)
    breaks = np.concatenate([-half[::-1], half[1:]])
    g = panel_grid(breaks, order)
    n = g.nodes.size
    nodes = g.nodes.copy()
    nodes[n // 2:] = -nodes[: n // 2][::-1]
    return PanelGrid(breaks=g.breaks, order=order, nodes=nodes, weights=g.weights)


def radius_for(space: ModelSpace, decay_hint: str, rate) -> float:
    """Truncation radius leaving a tail below ``1e-10`` of ``int |u| A dr``."""
    if decay_hint == "gaussian":
        # e^{-a r^2} A(r) peaks near r = rho / a
        return space.rho / rate + math.sqrt(23.0 / rate) + 5.0
    if decay_hint == "compact":
        return float(rate)
    if decay_hint == "exponential":
        excess = rate - 2.0 * space.rho
        if excess <= 0:
            raise TransformError("exponential decay slower than the volume growth")
        return 23.0 / excess + 5.0
    raise TransformError("cannot choose a radius for decay_hint='unknown'; pass r_max")


def _spectral_extent(decay_hint, rate):
    if decay_hint == "gaussian":
        # e^{-a r^2} has transform ~ e^{-lambda^2 / 4a}
        return max(10.0, 2.0 * math.sqrt(rate * _GAUSS_LOG_CUT))
    return None


def from_callable(space: ModelSpace, fn: Callable, decay_hint: str = "unknown", rate=None,
                  r_max: float | None = None, width: float | None = None) -> RadialFunction:
    """Sample ``fn`` on a default grid chosen from its decay."""
    if r_max is None:
        r_max = radius_for(space, decay_hint, rate)
    if width is None:
        extent = _spectral_extent(decay_hint, rate) or 0.0
        width = 0.5 if extent <= 60.0 else 0.25
    grid = radial_grid(r_max, width)
    vals = np.asarray(fn(grid.nodes))
    return RadialFunction(space, grid, grid.nodes, vals, decay_hint, rate, fn)


def gaussian(space: ModelSpace, a: float, amplitude: float = 1.0) -> RadialFunction:
    """``amplitude * e^{-a r^2}``."""
    if not a > 0:
        raise ValueError("Gaussian rate must be positive")
    fn = lambda r: amplitude * np.exp(-a * np.asarray(r, dtype=float) ** 2)  # noqa: E731
    return from_callable(space, fn, "gaussian", float(a))


def bump(space: ModelSpace, radius: float, amplitude: float = 1.0) -> RadialFunction:
    """Smooth compactly supported ``amplitude * exp(1 - 1/(1 - (r/R)^2))``."""
    if not radius > 0:
        raise ValueError("support radius must be positive")

    def fn(r):
        x = np.asarray(r, dtype=float) / radius
        inside = x < 1.0
        out = np.zeros_like(x)
        out[inside] = amplitude * np.exp(1.0 - 1.0 / (1.0 - x[inside] ** 2))
        return out

    f = from_callable(space, fn, "compact", float(radius), width=min(0.5, radius / 4.0))
    return f


def from_samples(space: ModelSpace, r, values, decay_hint="unknown", rate=None) -> RadialFunction:
    """Spline through point samples, re-sampled on a Gauss-Legendre grid up to ``max(r)``."""
    r = np.asarray(r, dtype=float)
    values = np.asarray(values)
    if r.ndim != 1 or r.size < 4 or np.any(np.diff(r) <= 0) or r[0] < 0:
        raise ValueError("need at least 4 strictly increasing non-negative radii")
    spline_re = CubicSpline(r, values.real)
    spline_im = CubicSpline(r, values.imag) if np.iscomplexobj(values) else None
    top = float(r[-1])

    def fn(x):
        x = np.asarray(x, dtype=float)
        v = spline_re(x) + (1j * spline_im(x) if spline_im is not None else 0.0)
        return np.where(x <= top, v, 0.0)

    return from_callable(space, fn, decay_hint, rate, r_max=top)


def _spherical_values(space, f: RadialFunction, lam, tol):
    weights = f.grid.weights * density_at(space, f.r) * f.values
    live = weights != 0
    if not live.any():
        return np.zeros(lam.size, dtype=complex if np.iscomplexobj(f.values) else float)
    # keep whole panels so the summation tree depends on the shape only
    panels = live.reshape(-1, f.grid.order).any(axis=1)
    keep = np.repeat(panels, f.grid.order)
    table = phi_table(space, lam, f.r[keep], tol=tol)
    return space.omega * fixed_sum(table * weights[keep], f.grid.order)


def spherical_ft(space: ModelSpace, f: RadialFunction, pdata: PlancherelData | None = None,
                 lam=None, tol: float = DEFAULT_TOL) -> SpectralFunction:
    """``f_hat(lambda) = omega int u phi_lambda A dr`` by panel quadrature.

    Parameters
    ----------
    lam : array_like, optional
        Evaluation points.  By default the spectral quadrature of ``pdata``
        is used, cut at the transform's own extent for Gaussian decay.
    """
    if f.grid is None:
        raise ValueError("spherical_ft needs a quadrature grid")
    extent = _spectral_extent(f.decay_hint, f.rate)
    meta = {}
    if lam is None:
        if pdata is None:
            raise ValueError("either pdata or lam is required")
        top = extent if extent is not None else pdata.lambda_cutoff
        grid = pdata.quadrature(top)
        lam = grid.nodes
        meta["lam_top"] = top
    else:
        grid = None
        lam = np.asarray(lam, dtype=float)
        meta["lam_top"] = extent if extent is not None else (float(lam.max()) if lam.size else 0.0)
    vals = _spherical_values(space, f, lam, tol)

    def source(x):
        return _spherical_values(space, f, np.asarray(x, dtype=float), tol)

    meta["radial_rate"] = f.rate if f.decay_hint == "gaussian" else None
    meta["r_max"] = f.r_max
    return SpectralFunction(space, grid, lam, vals, source, meta)


def refine_check(space: ModelSpace, f: RadialFunction, lam, tol: float = DEFAULT_TOL,
                 target: float = 1e-9, max_levels: int = 3):
    """Transform values under radial panel halving until two levels agree.

    Returns ``(values, achieved_relative_change, levels)``.
    """
    if f.source is None:
        raise ValueError("refinement needs a function with a source")
    lam = np.asarray(lam, dtype=float)
    prev = _spherical_values(space, f, lam, tol)
    width = float(np.max(np.diff(f.grid.breaks)))
    change = float("inf")
    for level in range(1, max_levels + 1):
        width *= 0.5
        g = f.on_grid(radial_grid(f.r_max, width))
        cur = _spherical_values(space, g, lam, tol)
        scale = max(float(np.max(np.abs(cur))), 1e-300)
        change = float(np.max(np.abs(cur - prev))) / scale
        prev = cur
        if change <= target:
            return cur, change, level
    raise TransformError(f"radial quadrature not converged: relative change {change:.2e} > {target:g}")


def _live_panels(grid: PanelGrid, weights_abs):
    """Drop trailing panels whose contribution is below ``_TAIL_REL`` of the peak."""
    per = np.abs(weights_abs).reshape(-1, grid.order).max(axis=1)
    if not per.any():
        return 0
    alive = np.nonzero(per > _TAIL_REL * per.max())[0]
    return int(alive[-1]) + 1


def _as_radial_nodes(r_values):
    if isinstance(r_values, PanelGrid):
        return r_values, r_values.nodes
    r = np.atleast_1d(np.asarray(r_values, dtype=float))
    return None, r


def inverse_ft(pdata: PlancherelData, F: SpectralFunction, r_values=None,
               tol: float = DEFAULT_TOL, decay_hint: str | None = None, rate=None,
               trim_noise: bool | None = None) -> RadialFunction:
    """``u(r) = C0 int F(lambda) phi_lambda(r) |c|^{-2} d lambda``.

    With a source on ``F`` the spectral panels are narrowed to resolve the
    oscillation of ``phi_lambda(r)`` up to the largest requested radius.

    Parameters
    ----------
    trim_noise : bool, optional
        Drop trailing radial panels whose values are all below the synthesis
        error floor (Gaussian decay only).  Defaults to ``True`` when the
        radial grid is chosen here and ``False`` for a caller's grid.
    """
    space = pdata.space
    if not np.isfinite(pdata.C0):
        raise ValueError("PlancherelData is not calibrated")
    if r_values is None:
        rrate = F.meta.get("radial_rate")
        if rrate is None:
            raise ValueError("r_values required when the output decay is unknown")
        grid_r = radial_grid(radius_for(space, "gaussian", rrate), 0.5 if F.lam_top <= 60 else 0.25)
        r = grid_r.nodes
        decay_hint, rate = "gaussian", rrate
        trim_noise = True if trim_noise is None else trim_noise
    else:
        grid_r, r = _as_radial_nodes(r_values)
    if r.size > 1 and np.any(np.diff(r) < 0):
        raise ValueError("radii must be sorted")
    if F.source is not None:
        width = min(0.5, 6.0 / max(float(r[-1]) + float(F.meta.get("phase_shift", 0.0)), 1e-3))
        grid = pdata.quadrature(F.lam_top, width=width)
        fvals = F.source(grid.nodes)
    else:
        if F.grid is None:
            raise ValueError("inverse_ft needs quadrature weights on F")
        grid, fvals = F.grid, F.values
    dens = pdata.density(grid.nodes)
    w = grid.weights * dens * fvals
    n_live = _live_panels(grid, w)
    if n_live == 0:
        vals = np.zeros(r.shape, dtype=complex if np.iscomplexobj(w) else float)
    else:
        if n_live == grid.n_panels and F.source is None and abs(w[-1]) > 1e-10 * np.abs(w).max():
            raise TransformError(
                f"spectral truncation at lambda={grid.breaks[-1]:g} leaves relative tail "
                f"{abs(w[-1]) / np.abs(w).max():.1e}; raise lambda_max"
            )
        m = n_live * grid.order
        table = phi_table(space, grid.nodes[:m], r, tol=tol)
        vals = pdata.C0 * fixed_sum(table.T * w[:m], grid.order)
        # eigenfunction errors at the integrator level tol / 10 survive the
        # cancellation in the sum; below this the values carry no signal
        noise = 0.1 * tol * pdata.C0 * (np.abs(table).T @ np.abs(w[:m]))
    decay_hint = decay_hint or "unknown"
    if grid_r is None:
        return RadialFunction(space, None, r, vals, decay_hint, rate)
    meta = {}
    if trim_noise and n_live and decay_hint == "gaussian":
        grid_r, vals, meta = _trim_noise(grid_r, vals, noise)
    return RadialFunction(space, grid_r, grid_r.nodes, vals, decay_hint, rate, meta=meta)


def _trim_noise(grid: PanelGrid, vals, noise):
    """Drop trailing panels where every value is below its error scale.

    Past that point the sum is pure cancellation error, which the volume
    factor would otherwise amplify into a spurious tail.
    """
    per = (np.abs(vals) > noise).reshape(-1, grid.order).any(axis=1)
    keep = max(int(np.nonzero(per)[0][-1]) + 2, 1) if per.any() else 1
    if keep >= grid.n_panels:
        return grid, vals, {}
    trimmed = panel_grid(grid.breaks[: keep + 1], grid.order)
    return trimmed, vals[: keep * grid.order], {"trimmed_from": float(grid.breaks[-1])}


def lp_norm(space: ModelSpace, f: RadialFunction, p: float, tail_budget: float = TAIL_BUDGET) -> float:
    """``(omega int |u|^p A dr)^{1/p}``; ``p = inf`` gives ``max |u|``.

    Raises :class:`TransformError` when the last panel carries more than
    ``tail_budget`` of the integral.
    """
    if p == math.inf:
        return float(np.max(np.abs(f.values))) if f.values.size else 0.0
    if not p >= 1:
        raise ValueError("p must be in [1, inf]")
    if f.grid is None:
        raise ValueError("norms need a quadrature grid")
    integrand = np.abs(f.values) ** p * density_at(space, f.r)
    _check_tail(f, integrand, tail_budget)
    return float(space.omega * f.grid.integrate(integrand)) ** (1.0 / p)


def tail_ratio(space: ModelSpace, f: RadialFunction, p: float = 1.0) -> float:
    """Share of ``int |u|^p A dr`` estimated to sit in the last radial panel."""
    if f.decay_hint == "compact" or f.values.size == 0:
        return 0.0
    return _tail_ratio(f, np.abs(f.values) ** p * density_at(space, f.r))


def _tail_ratio(f: RadialFunction, integrand) -> float:
    last = np.abs(integrand[-f.grid.order:]).max() * (f.grid.breaks[-1] - f.grid.breaks[-2])
    total = np.abs(f.grid.integrate(integrand))
    return float(last / total) if total > 0 else 0.0


def _check_tail(f: RadialFunction, integrand, budget: float = TAIL_BUDGET):
    if f.decay_hint == "compact" or integrand.size == 0:
        return
    ratio = _tail_ratio(f, integrand)
    if ratio > budget:
        raise TransformError(f"integrand not decayed at r_max={f.r_max:g} (tail ratio {ratio:.1e})")


def weighted_l2(space: ModelSpace, f: RadialFunction, w: float) -> float:
    """``(omega int r^{2w} |u|^2 A dr)^{1/2}``."""
    if w < 0:
        raise ValueError("weight exponent must be non-negative")
    integrand = f.r ** (2.0 * w) * np.abs(f.values) ** 2 * density_at(space, f.r)
    _check_tail(f, integrand)
    return math.sqrt(space.omega * f.grid.integrate(integrand))


def spectral_l2(pdata: PlancherelData, F: SpectralFunction, b: float = 0.0) -> float:
    """``(C0 int (lambda^2 + rho^2)^b |F|^2 |c|^{-2} d lambda)^{1/2}``."""
    if b < 0:
        raise ValueError("b must be non-negative")
    lam = F.lam
    integrand = (lam * lam + pdata.rho**2) ** b * np.abs(F.values) ** 2 * pdata.density(lam)
    return math.sqrt(pdata.C0 * F.integrate(integrand))


def convolve_radial(pdata: PlancherelData, f: RadialFunction, g: RadialFunction,
                    r_values=None, tol: float = DEFAULT_TOL) -> RadialFunction:
    """``f * g`` through ``(f * g)^ = f_hat g_hat``."""
    space = pdata.space
    ef = _spectral_extent(f.decay_hint, f.rate) or pdata.lambda_cutoff
    eg = _spectral_extent(g.decay_hint, g.rate) or pdata.lambda_cutoff
    top = max(10.0, min(ef, eg))
    rate = None
    if f.decay_hint == "gaussian" and g.decay_hint == "gaussian":
        rate = 1.0 / (1.0 / f.rate + 1.0 / g.rate)
    grid = pdata.quadrature(top)
    fh = spherical_ft(space, f, lam=grid.nodes, tol=tol)
    gh = spherical_ft(space, g, lam=grid.nodes, tol=tol)

    def source(x):
        return fh.source(x) * gh.source(x)

    prod = SpectralFunction(space, grid, grid.nodes, fh.values * gh.values, source,
                            {"lam_top": top, "radial_rate": rate})
    if r_values is None and rate is None:
        reach = f.r_max + g.r_max
        r_values = radial_grid(reach)
        return inverse_ft(pdata, prod, r_values, tol=tol, decay_hint="compact"
                          if "compact" == f.decay_hint == g.decay_hint else "unknown", rate=reach)
    if rate is not None:
        return inverse_ft(pdata, prod, r_values, tol=tol, decay_hint="gaussian", rate=rate)
    return inverse_ft(pdata, prod, r_values, tol=tol)


def abel_transform(pdata: PlancherelData, f: RadialFunction, s_grid=None,
                   tol: float = DEFAULT_TOL) -> LineFunction:
    """``Rf(s) = (1/pi) int_0^inf f_hat(lambda) cos(lambda s) d lambda``.

    ``f_hat`` is even in ``lambda``, so this is the inverse Euclidean
    transform of its even extension.
    """
    space = pdata.space
    if s_grid is None:
        rate = f.rate if f.decay_hint == "gaussian" else None
        s_max = radius_for(space, "gaussian", rate) if rate else f.r_max
        grid_s = line_grid(s_max)
        s = grid_s.nodes
    elif isinstance(s_grid, PanelGrid):
        grid_s, s = s_grid, s_grid.nodes
    else:
        grid_s, s = None, np.atleast_1d(np.asarray(s_grid, dtype=float))
    extent = _spectral_extent(f.decay_hint, f.rate) or pdata.lambda_cutoff
    smax = float(np.max(np.abs(s))) if s.size else 0.0
    width = min(0.5, 6.0 / max(smax, 1e-3))
    grid = pdata.quadrature(extent, width=width)
    fh = spherical_ft(space, f, lam=grid.nodes, tol=tol).values
    vals = fixed_sum(np.cos(np.outer(s, grid.nodes)) * (grid.weights * fh), grid.order) / math.pi
    if not np.iscomplexobj(f.values):
        vals = np.real(vals)
    return LineFunction(grid_s, s, vals, {"lam_top": extent})


def euclidean_ft(g: LineFunction, lam) -> SpectralFunction | np.ndarray:
    """``G(lambda) = int e^{-i lambda s} g(s) ds`` at the given ``lambda``."""
    if g.grid is None:
        raise ValueError("Euclidean transform needs a quadrature grid")
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    kern = np.exp(-1j * np.outer(lam, g.s))
    return fixed_sum(kern * (g.grid.weights * g.values), g.grid.order)


def inverse_euclidean_ft(F: SpectralFunction, s) -> LineFunction:
    """``(1/2 pi) int F(lambda) e^{i lambda s} d lambda`` for even ``F`` given on ``lambda >= 0``."""
    if F.grid is None:
        raise ValueError("inverse transform needs quadrature weights")
    if isinstance(s, PanelGrid):
        grid_s, nodes = s, s.nodes
    else:
        grid_s, nodes = None, np.atleast_1d(np.asarray(s, dtype=float))
    vals = fixed_sum(np.cos(np.outer(nodes, F.lam)) * (F.grid.weights * F.values), F.grid.order) / math.pi
    return LineFunction(grid_s, nodes, vals)
