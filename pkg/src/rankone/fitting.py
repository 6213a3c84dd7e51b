"""
Decay-rate fits for Gaussian-type tails.

A tail ``|y(x)| ~ B x^m e^{g x - beta x^2}`` is fitted by weighted least
squares on ``log |y|`` over a window of relative magnitudes.  The nuisance
terms ``g x`` and ``m log x`` absorb lower-order factors so ``beta`` is not
biased by them; oscillating data are reduced to their local maxima first.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

__all__ = ["FitError", "DecayFit", "fit_gaussian_decay", "fit_stretched_decay", "local_peaks"]

NUISANCE = ("linear", "power")


class FitError(RuntimeError):
    """Not enough usable points, or the residual exceeds its cap."""


@dataclass
class DecayFit:
    """Result of a decay fit.

    Attributes
    ----------
    model : str
        ``gaussian`` (``B e^{-beta x^2}``) or ``stretched`` (``B e^{-beta x^p}``).
    B, beta, p : float
    window : tuple of float
        ``(x_lo, x_hi)`` of the points used.
    residual : float
        RMS of the log-residual.
    n_points : int
    extra : dict
        Nuisance coefficients.
    """

    model: str
    B: float
    beta: float
    p: float
    window: tuple
    residual: float
    n_points: int
    extra: dict = field(default_factory=dict)


def local_peaks(y) -> np.ndarray:
    """Indices of interior local maxima of ``|y|``."""
    ay = np.abs(np.asarray(y))
    return np.nonzero((ay[1:-1] > ay[:-2]) & (ay[1:-1] >= ay[2:]))[0] + 1


def _window(x, y, rel_lo, rel_hi, x_min, floor):
    ay = np.abs(y)
    peak = ay.max()
    if peak == 0:
        raise FitError("identically zero data")
    # skip the decade just above the lower cut to stay clear of truncation noise
    lo = max(rel_lo * peak, floor) * 10.0
    ipk = int(np.argmax(ay))
    sel = (ay > lo) & (ay < rel_hi * peak) & (x > max(x_min, x[ipk]))
    # nothing past the last point above the cut (the tail beyond is noise)
    above = np.nonzero(ay > lo)[0]
    sel &= x <= x[above[-1]]
    return sel


def fit_gaussian_decay(x, y, rel_window=(1e-12, 1e-2), x_min=0.0, nuisance=NUISANCE,
                       floor=0.0, peaks="auto", residual_cap=0.05, min_points=6) -> DecayFit:
    """Fit ``log|y| = log B + g x + m log x - beta x^2``.

    Parameters
    ----------
    rel_window : (float, float)
        Magnitudes relative to ``max|y|`` that enter the fit.
    nuisance : sequence of str
        Subset of ``("linear", "power")``.
    floor : float
        Absolute noise floor; the window never reaches within a decade of it.
    peaks : {"auto", True, False}
        Fit local maxima only.  ``"auto"`` does so when the data change sign
        or dip to zero inside the window and enough maxima are available.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y)
    sel = _window(x, y, rel_window[0], rel_window[1], x_min, floor)
    auto = peaks == "auto"
    if auto:
        ay = np.abs(y[sel])
        peaks = ay.size > 2 and bool(np.any(np.diff(np.sign(np.real(y[sel]))) != 0) or local_peaks(-ay).size > 0)
        peaks = "auto" if peaks else False
    if peaks:
        pk = np.zeros_like(sel)
        pk[local_peaks(y)] = True
        if (sel & pk).sum() >= min_points:
            sel = sel & pk
        elif peaks is True:
            raise FitError(f"only {(sel & pk).sum()} peaks in the fit window")
    if sel.sum() < min_points:
        raise FitError(f"only {sel.sum()} points in the fit window")
    xs, ly = x[sel], np.log(np.abs(y[sel]))
    cols = [np.ones_like(xs), -xs * xs]
    names = ["logB", "beta"]
    if "linear" in nuisance:
        cols.append(xs)
        names.append("linear")
    if "power" in nuisance:
        if np.any(xs <= 0):
            raise FitError("power nuisance needs x > 0")
        cols.append(np.log(xs))
        names.append("power")
    X = np.stack(cols, axis=1)
    # scale columns so the normal equations stay well conditioned
    scale = np.abs(X).max(axis=0)
    coef, *_ = np.linalg.lstsq(X / scale, ly, rcond=None)
    coef = coef / scale
    res = ly - X @ coef
    rms = float(np.sqrt(np.mean(res * res)))
    if rms > residual_cap:
        raise FitError(f"fit residual {rms:.3g} above cap {residual_cap:g}")
    extra = {n: float(c) for n, c in zip(names[2:], coef[2:])}
    return DecayFit("gaussian", float(np.exp(coef[0])), float(coef[1]), 2.0,
                    (float(xs[0]), float(xs[-1])), rms, int(sel.sum()), extra)


def fit_stretched_decay(x, y, rel_window=(1e-12, 1e-2), x_min=0.0, floor=0.0,
                        residual_cap=0.2) -> DecayFit:
    """Fit ``log|y| = log B - beta x^p`` with ``p`` free (report-only use)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y)
    sel = _window(x, y, rel_window[0], rel_window[1], max(x_min, 1e-12), floor)
    if sel.sum() < 6:
        raise FitError(f"only {sel.sum()} points in the fit window")
    xs, ly = x[sel], np.log(np.abs(y[sel]))

    def resid(th):
        return th[0] - np.exp(th[1]) * xs ** th[2] - ly

    sol = least_squares(resid, x0=[ly[0], np.log(max(1e-3, -np.polyfit(xs * xs, ly, 1)[0])), 2.0],
                        bounds=([-np.inf, -50.0, 0.2], [np.inf, 50.0, 8.0]))
    rms = float(np.sqrt(np.mean(sol.fun**2)))
    if rms > residual_cap:
        raise FitError(f"stretched fit residual {rms:.3g} above cap {residual_cap:g}")
    return DecayFit("stretched", float(np.exp(sol.x[0])), float(np.exp(sol.x[1])), float(sol.x[2]),
                    (float(xs[0]), float(xs[-1])), rms, int(sel.sum()))
