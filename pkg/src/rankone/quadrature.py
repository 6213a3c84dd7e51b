"""
Composite Gauss-Legendre rules and panel-wise barycentric interpolation.

All grids in the package are unions of equal-order Gauss-Legendre panels.
Sums over such grids are taken panel by panel in a fixed order so that
repeated runs reproduce the same bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = ["PanelGrid", "gauss_legendre", "panel_grid", "panel_breaks", "fixed_sum"]


@lru_cache(maxsize=None)
def _reference_rule(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    # barycentric weights for Legendre nodes
    bw = (-1.0) ** np.arange(order) * np.sqrt((1.0 - x * x) * w)
    x.flags.writeable = False
    w.flags.writeable = False
    bw.flags.writeable = False
    return x, w, bw


def gauss_legendre(a: float, b: float, order: int):
    """Nodes and weights of the ``order``-point rule on ``[a, b]``."""
    x, w, _ = _reference_rule(order)
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * x, half * w


def panel_breaks(a: float, b: float, width: float, anchors=()) -> np.ndarray:
    """Panel end points of width at most ``width`` covering ``[a, b]``.

    ``anchors`` are extra break points (inside ``(a, b)``) that must be panel
    ends, e.g. the start of a tabulated region.
    """
    if not b > a:
        raise ValueError(f"empty interval [{a}, {b}]")
    if width <= 0:
        raise ValueError("panel width must be positive")
    pts = sorted({float(a), float(b), *(float(p) for p in anchors if a < p < b)})
    out = [pts[0]]
    for lo, hi in zip(pts[:-1], pts[1:]):
        m = max(1, int(np.ceil((hi - lo) / width - 1e-9)))
        out.extend(lo + (hi - lo) * np.arange(1, m + 1) / m)
    out[-1] = float(b)
    return np.asarray(out)


@dataclass(frozen=True)
class PanelGrid:
    """A composite Gauss-Legendre grid.

    Attributes
    ----------
    breaks : ndarray
        Panel end points, ``len(breaks) = n_panels + 1``.
    order : int
        Nodes per panel.
    nodes, weights : ndarray
        Flattened nodes and weights, panel-major.
    """

    breaks: np.ndarray
    order: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n_panels(self) -> int:
        return len(self.breaks) - 1

    def integrate(self, values, axis=-1):
        """``sum(weights * values)`` along ``axis`` in a fixed panel order."""
        return fixed_sum(np.moveaxis(np.asarray(values), axis, -1) * self.weights, self.order)

    def interpolate(self, values, x):
        """Evaluate the per-panel interpolating polynomial of ``values`` at ``x``.

        Points outside ``[breaks[0], breaks[-1]]`` are extrapolated from the
        nearest panel; callers are expected to stay inside.
        """
        x = np.asarray(x, dtype=float)
        values = np.asarray(values)
        flat = x.ravel()
        idx = np.clip(np.searchsorted(self.breaks, flat, side="right") - 1, 0, self.n_panels - 1)
        ref, _, bw = _reference_rule(self.order)
        lo, hi = self.breaks[idx], self.breaks[idx + 1]
        t = (2.0 * flat - lo - hi) / (hi - lo)
        vals = values.reshape(self.n_panels, self.order)[idx]
        d = t[:, None] - ref[None, :]
        exact = d == 0.0
        d[exact] = 1.0
        terms = bw / d
        out = (terms * vals).sum(axis=1) / terms.sum(axis=1)
        hit = exact.any(axis=1)
        if hit.any():
            out[hit] = vals[hit][exact[hit]]
        return out.reshape(x.shape)


def panel_grid(breaks, order: int) -> PanelGrid:
    breaks = np.asarray(breaks, dtype=float)
    ref, w, _ = _reference_rule(order)
    half = 0.5 * np.diff(breaks)
    mid = 0.5 * (breaks[:-1] + breaks[1:])
    nodes = (mid[:, None] + half[:, None] * ref[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return PanelGrid(breaks=breaks, order=order, nodes=nodes, weights=weights)


def fixed_sum(terms, order: int):
    """Sum the last axis, first within panels of ``order`` terms, then across.

    The reduction tree is fixed by the shape alone, which keeps results
    bit-identical across runs and thread counts.
    """
    terms = np.asarray(terms)
    n = terms.shape[-1]
    if n % order:
        return terms.sum(axis=-1)
    per_panel = terms.reshape(*terms.shape[:-1], n // order, order).sum(axis=-1)
    return per_panel.sum(axis=-1)
