"""
Radial eigenfunctions ``phi_lambda`` of ``d^2/dr^2 + (A'/A) d/dr``.

``phi_lambda`` solves ``phi'' + (A'/A) phi' = -(lambda^2 + rho^2) phi`` with
``phi(0) = 1``, ``phi'(0) = 0``.  The origin is a regular singular point, so
the solution is started from its even power series at a small radius ``r0``
and continued with an adaptive Dormand-Prince 8(5,3) integrator.

The integration is carried out in Liouville form.  With
``psi = sqrt(A(r) / A(r0)) phi`` the equation reads ``psi'' = (q - lambda^2) psi``
where ``q`` decays like ``e^{-2r}``, so ``psi`` stays of order one for real
``lambda`` and the exponential decay of ``phi`` is restored in closed form.
Many spectral parameters share one integration pass (the right-hand side is
vectorized over ``lambda``).
"""

from __future__ import annotations

import math
import threading
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.integrate import solve_ivp

from .model_space import ModelSpace, SpaceKind, log_density, log_derivative_at

__all__ = [
    "EigenfunctionError",
    "DEFAULT_TOL",
    "SERIES_SWITCH",
    "ASYMPTOTIC_RADIUS",
    "series_coefficients",
    "phi",
    "phi_profile",
    "phi_table",
    "renormalized_table",
    "set_workers",
    "clear_cache",
]

DEFAULT_TOL = 1e-10
SERIES_SWITCH = 1e-3
ASYMPTOTIC_RADIUS = 50.0
DEFAULT_MAX_EVALS = 2_000_000
BLOCK = 256

# Integration always runs to a multiple of this radius so that the step
# sequence (and thus every dense-output value) does not depend on the
# requested nodes.
_BOUND_STEP = 5.0

_workers = 1


class EigenfunctionError(RuntimeError):
    """Integration failed or exceeded its evaluation budget."""


def set_workers(n: int) -> None:
    """Number of threads used for independent ``lambda`` blocks."""
    global _workers
    _workers = max(1, int(n))


def series_coefficients(space: ModelSpace, lam, order: int = 4) -> np.ndarray:
    """Coefficients ``a_0 .. a_order`` of ``phi(r) = sum a_j r^{2j}``.

    ``a_0 = 1``, ``a_1 = -(lambda^2 + rho^2) / (4 (alpha + 1))``; higher terms
    follow from the odd expansion of ``A'/A`` at the origin.

    Returns
    -------
    ndarray
        Shape ``(order + 1,)`` for scalar ``lam``, ``(order + 1, len(lam))``
        otherwise.  Complex when ``lam`` is complex.
    """
    if not isinstance(order, (int, np.integer)) or not 0 <= order <= 4:
        raise ValueError(f"series order must be an integer in [0, 4], got {order!r}")
    lam = np.asarray(lam)
    mu = lam * lam + space.rho**2
    if not np.iscomplexobj(mu):
        mu = mu.astype(float)
    b = space.log_derivative_series
    alpha = space.alpha
    a = [np.ones_like(mu)]
    for j in range(1, order + 1):
        acc = mu * a[j - 1]
        for i in range(1, j):
            acc = acc + 2.0 * (j - i) * b[i - 1] * a[j - i]
        a.append(-acc / (4.0 * j * (j + alpha)))
    return np.array(a)


def _series_eval(coeffs, r):
    """``phi`` and ``phi'`` from the even series; ``coeffs`` is ``(order+1, N)``."""
    r = np.asarray(r, dtype=float)
    order = coeffs.shape[0] - 1
    val = np.zeros(coeffs.shape[1:] + r.shape, dtype=coeffs.dtype)
    der = np.zeros_like(val)
    r2 = r * r
    # Horner in r^2
    for j in range(order, -1, -1):
        val = val * r2 + coeffs[j][..., None]
    for j in range(order, 0, -1):
        der = der * r2 + (2 * j * coeffs[j])[..., None]
    der = der * r
    return val, der


def _potential_fn(space: ModelSpace):
    """Scalar ``q(r)`` using ``math`` for speed inside the right-hand side."""
    if space.kind is SpaceKind.HYPERBOLIC:
        c = space.rho * (space.rho - 1.0)
        if c == 0.0:
            return lambda r: 0.0

        def q(r):
            if r > 300.0:
                return 0.0
            s = math.sinh(r)
            return c / (s * s)

        return q
    s_, k_ = space.m + space.k, space.k
    two_rho = 2.0 * space.rho

    def q(r):
        if r > 300.0:
            return 0.0
        h = 0.5 * r
        sh, ch = math.sinh(h), math.cosh(h)
        dlog = -0.25 * s_ / (sh * sh) + 0.25 * k_ / (ch * ch)
        em1 = math.expm1(r)
        lower = 0.5 * s_ / em1 - 0.5 * k_ / (em1 + 2.0)
        return 0.5 * dlog + lower * (lower + two_rho)

    return q


def _launch_radius(mu, switch):
    mmax = float(np.max(np.abs(mu))) if np.size(mu) else 0.0
    if mmax == 0.0:
        return switch
    return min(switch, 0.1 / math.sqrt(mmax))


def _bound_for(rmax: float) -> float:
    return _BOUND_STEP * math.ceil((rmax + 1.0) / _BOUND_STEP)


def _integrate_block(space, lam, r_eval, tol, switch, max_evals, exact_end=False):
    """Scaled Liouville solution ``psi/sqrt(A(r0))`` at ``r_eval > r0``.

    Returns ``(psi_hat, r0, coeffs)`` where ``psi_hat`` has shape
    ``(len(lam), len(r_eval))``.
    """
    lam = np.asarray(lam)
    n = lam.size
    mu = lam * lam + space.rho**2
    r0 = _launch_radius(mu, switch)
    coeffs = series_coefficients(space, lam, 4)
    r_eval = np.asarray(r_eval, dtype=float)
    if r_eval.size == 0:
        return np.zeros((n, 0), dtype=coeffs.dtype), r0, coeffs
    p0, dp0 = _series_eval(coeffs, np.array([r0]))
    p0, dp0 = p0[:, 0], dp0[:, 0]
    half_l = 0.5 * log_derivative_at(space, r0)
    y0 = np.concatenate([p0, dp0 + half_l * p0])
    lam2 = lam * lam
    q = _potential_fn(space)
    calls = [0]

    def rhs(r, y):
        calls[0] += 1
        if calls[0] > max_evals:
            raise EigenfunctionError(
                f"evaluation budget {max_evals} exhausted at r={r:.4g} "
                f"(max |lambda|={float(np.max(np.abs(lam))):.4g}, tol={tol:g})"
            )
        out = np.empty_like(y)
        out[:n] = y[n:]
        out[n:] = (q(r) - lam2) * y[:n]
        return out

    rtol = 0.1 * tol
    t_end = float(r_eval[-1]) if exact_end else _bound_for(float(r_eval[-1]))
    sol = solve_ivp(
        rhs,
        (r0, t_end),
        y0,
        method="DOP853",
        rtol=rtol,
        atol=rtol,
        t_eval=r_eval,
    )
    if sol.status != 0:
        raise EigenfunctionError(f"integration failed: {sol.message}")
    return sol.y[:n], r0, coeffs


def _to_phi(space, psi_hat, r0, r):
    scale = np.exp(0.5 * (float(log_density(space, r0)) - log_density(space, r)))
    return psi_hat * scale


def _check_inputs(lam, r):
    lam = np.atleast_1d(np.asarray(lam))
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if lam.ndim != 1 or r.ndim != 1:
        raise ValueError("lambda and r must be one-dimensional")
    if not np.all(np.isfinite(lam)):
        raise ValueError("lambda must be finite")
    if not np.all(np.isfinite(r)):
        raise ValueError("r must be finite")
    if np.any(r < 0):
        raise ValueError("r must be non-negative")
    if r.size > 1 and np.any(np.diff(r) < 0):
        raise ValueError("r must be sorted ascending")
    if np.iscomplexobj(lam) and not np.any(lam.imag):
        lam = lam.real.copy()
    if not np.iscomplexobj(lam):
        lam = lam.astype(float)
    return lam, r


def _block_table(space, lam, r, tol, switch, max_evals, asymptotic):
    """``phi`` for one block of ``lambda`` on sorted ``r``."""
    real = not np.iscomplexobj(lam)
    out = np.empty((lam.size, r.size), dtype=float if real else complex)
    mu = lam * lam + space.rho**2
    r0 = _launch_radius(mu, switch)
    small = r < r0
    coeffs = series_coefficients(space, lam, 4)
    if small.any():
        out[:, small] = _series_eval(coeffs, r[small])[0]
    far = np.zeros_like(small)
    lam_min = None
    if asymptotic and real:
        from .spectral_measure import LAMBDA_MIN

        lam_min = LAMBDA_MIN
        if np.all(np.abs(lam) >= lam_min):
            far = r > ASYMPTOTIC_RADIUS
    mid = ~small & ~far
    if mid.any():
        psi, r0b, _ = _integrate_block(space, lam, r[mid], tol, switch, max_evals)
        out[:, mid] = _to_phi(space, psi, r0b, r[mid])
    if far.any():
        from .spectral_measure import extract_c_batch

        c = extract_c_batch(space, np.abs(lam), tol=max(tol * 100.0, 1e-8))
        rf = r[far]
        phase = np.exp(1j * np.outer(np.abs(lam), rf))
        out[:, far] = 2.0 * np.exp(-space.rho * rf)[None, :] * (c[:, None] * phase).real
    return out


_cache: "OrderedDict[tuple, np.ndarray]" = OrderedDict()
_cache_lock = threading.Lock()
_CACHE_SIZE = 48


def clear_cache() -> None:
    with _cache_lock:
        _cache.clear()


def phi_table(
    space: ModelSpace,
    lam,
    r,
    tol: float = DEFAULT_TOL,
    series_switch: float = SERIES_SWITCH,
    max_evals: int = DEFAULT_MAX_EVALS,
    asymptotic: bool = True,
) -> np.ndarray:
    """Matrix ``phi_{lam[i]}(r[j])``.

    ``lam`` is split into blocks of nearby values; each block is integrated
    in one vectorized pass.  Results are memoized on the exact inputs.

    Parameters
    ----------
    space : ModelSpace
    lam : array_like
        Spectral parameters, real or complex.
    r : array_like
        Sorted non-negative radii.
    tol : float
        Requested accuracy; the integrator runs at ``tol / 10``.
    asymptotic : bool
        For real ``|lambda| >= 0.05`` evaluate ``r > 50`` from the
        ``c``-function expansion instead of integrating further.

    Returns
    -------
    ndarray, shape ``(len(lam), len(r))``
    """
    lam, r = _check_inputs(lam, r)
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    key = (space, lam.dtype.str, lam.tobytes(), r.tobytes(), float(tol), float(series_switch), asymptotic)
    with _cache_lock:
        hit = _cache.get(key)
        if hit is not None:
            _cache.move_to_end(key)
            return hit.copy()
    order = np.argsort(np.abs(lam), kind="stable")
    blocks = [order[i : i + BLOCK] for i in range(0, lam.size, BLOCK)]
    out = np.empty((lam.size, r.size), dtype=float if not np.iscomplexobj(lam) else complex)

    def run(idx):
        return _block_table(space, lam[idx], r, tol, series_switch, max_evals, asymptotic)

    if _workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=_workers) as pool:
            results = list(pool.map(run, blocks))
    else:
        results = [run(b) for b in blocks]
    for idx, res in zip(blocks, results):
        out[idx] = res
    out.flags.writeable = False
    with _cache_lock:
        _cache[key] = out
        while len(_cache) > _CACHE_SIZE:
            _cache.popitem(last=False)
    return out.copy()


def phi(space: ModelSpace, lam, r, tol: float = DEFAULT_TOL, **kw):
    """``phi_lambda(r)`` for scalar ``lam`` and scalar or array ``r``.

    Returns a Python complex for scalar ``r``.
    """
    scalar = np.ndim(r) == 0
    if np.ndim(lam) != 0:
        raise ValueError("phi takes a scalar lambda; use phi_table for batches")
    rr = np.atleast_1d(np.asarray(r, dtype=float))
    order = np.argsort(rr, kind="stable")
    vals = phi_table(space, [lam], rr[order], tol=tol, **kw)[0]
    out = np.empty(rr.shape, dtype=complex)
    out[order] = vals
    return complex(out[0]) if scalar else out


def phi_profile(space: ModelSpace, lam, grid, tol: float = DEFAULT_TOL, **kw) -> np.ndarray:
    """``phi_lambda`` on a sorted grid from a single integration sweep."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1:
        raise ValueError("grid must be one-dimensional")
    return phi_table(space, [lam], grid, tol=tol, **kw)[0].astype(complex)


def renormalized_table(space: ModelSpace, lam, r, tol: float = DEFAULT_TOL, max_evals=DEFAULT_MAX_EVALS):
    """``e^{rho r} phi_lambda(r)`` for real ``lam > 0`` and ``r`` well away from 0.

    Computed from the Liouville solution and log-densities so that nothing
    under- or overflows at large ``r``.  Used for ``c``-function extraction.
    """
    lam = np.asarray(lam, dtype=float)
    r = np.asarray(r, dtype=float)
    psi, r0, _ = _integrate_block(space, lam, r, tol, SERIES_SWITCH, max_evals, exact_end=True)
    logscale = 0.5 * (float(log_density(space, r0)) - log_density(space, r)) + space.rho * r
    return psi * np.exp(logscale)
