"""
Closed forms used as independent references.

Nothing here calls the ODE machinery; these are classical formulas for
real hyperbolic spaces, Damek-Ricci spaces and the real line.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import loggamma

__all__ = [
    "hyperbolic_c_function",
    "hyperbolic_plancherel_density",
    "damek_ricci_c_function",
    "damek_ricci_plancherel_density",
    "h3_phi",
    "h3_plancherel_constant",
    "h3_heat_kernel",
    "h5_heat_kernel",
    "h3_gaussian_transform",
    "line_heat_abel",
    "line_gaussian_ft",
    "line_schrodinger_rate",
]


def hyperbolic_c_function(n: int, lam):
    """Harish-Chandra ``c(lambda)`` on ``H^n`` with ``phi_lambda(0) = 1``.

    ``c(lambda) = 2^{n-2} Gamma(n/2) Gamma(i lambda) / (sqrt(pi) Gamma(i lambda + rho))``.
    """
    lam = np.asarray(lam, dtype=complex)
    rho = 0.5 * (n - 1)
    logc = (
        (n - 2) * math.log(2.0)
        + float(loggamma(0.5 * n).real)
        - 0.5 * math.log(math.pi)
        + loggamma(1j * lam)
        - loggamma(1j * lam + rho)
    )
    return np.exp(logc)


def hyperbolic_plancherel_density(n: int, lam):
    """``|c(lambda)|^{-2}`` on ``H^n`` for real ``lambda > 0``."""
    return np.abs(hyperbolic_c_function(n, lam)) ** -2.0


def damek_ricci_c_function(m: int, k: int, lam):
    """``c(lambda)`` on the Damek-Ricci space with ``dim v = m``, ``dim z = k``.

    ``c(lambda) = 2^{Q - 2 i lambda} Gamma(2 i lambda) Gamma(d/2)
    / (Gamma(Q/2 + i lambda) Gamma(m/4 + 1/2 + i lambda))`` with
    ``Q = m/2 + k = 2 rho`` and ``d = m + k + 1``.
    """
    z = 1j * np.asarray(lam, dtype=complex)
    Q = 0.5 * m + k
    logc = (
        (Q - 2.0 * z) * math.log(2.0)
        + loggamma(2.0 * z)
        + float(loggamma(0.5 * (m + k + 1)).real)
        - loggamma(0.5 * Q + z)
        - loggamma(0.25 * m + 0.5 + z)
    )
    return np.exp(logc)


def damek_ricci_plancherel_density(m: int, k: int, lam):
    """``|c(lambda)|^{-2}`` on a Damek-Ricci space for real ``lambda > 0``."""
    return np.abs(damek_ricci_c_function(m, k, lam)) ** -2.0


def h3_phi(lam, r):
    """``sin(lambda r) / (lambda sinh r)``, the spherical function of ``H^3``."""
    lam = np.asarray(lam, dtype=complex)
    r = np.asarray(r, dtype=float)
    lam, r = np.broadcast_arrays(lam, r)
    out = np.ones(lam.shape, dtype=complex)
    pos = r > 0
    z = lam[pos] * r[pos]
    # sin(z)/z, with its Taylor form where the quotient would lose precision
    small = np.abs(z) < 1e-4
    zs = np.where(small, 1.0, z)
    ratio = np.where(small, 1.0 - z * z / 6.0, np.sin(zs) / zs)
    out[pos] = r[pos] * ratio / np.sinh(r[pos])
    return out


def h3_plancherel_constant() -> float:
    return 1.0 / (2.0 * math.pi**2)


def h3_heat_kernel(t, r):
    """``(4 pi t)^{-3/2} e^{-t} (r / sinh r) e^{-r^2/4t}``."""
    r = np.asarray(r, dtype=float)
    ratio = np.where(r > 0, r / np.sinh(np.where(r > 0, r, 1.0)), 1.0)
    return (4.0 * math.pi * t) ** -1.5 * np.exp(-t - r * r / (4.0 * t)) * ratio


def h5_heat_kernel(t, r):
    """Heat kernel of ``H^5``, from the ``H^3`` one by ``-(2 pi sinh r)^{-1} d/dr``."""
    r = np.asarray(r, dtype=float)
    small = r < 1e-3
    rs = np.where(small, 1.0, r)
    sh = np.sinh(rs)
    # (r cosh r - sinh r) / sinh^3 r and r^2 / sinh^2 r with their Taylor limits
    a = np.where(small, 1.0 / 3.0 - 2.0 * r * r / 15.0, (rs * np.cosh(rs) - sh) / sh**3)
    b = np.where(small, 1.0 - r * r / 3.0, rs * rs / sh**2)
    pref = (4.0 * math.pi * t) ** -1.5 * math.exp(-4.0 * t) / (2.0 * math.pi)
    return pref * np.exp(-r * r / (4.0 * t)) * (a + b / (2.0 * t))


def h3_gaussian_transform(a: float, lam):
    """Spherical transform of ``e^{-a r^2}`` on ``H^3``.

    ``(2 pi / lambda) sqrt(pi/a) e^{(1 - lambda^2)/4a} sin(lambda / 2a)``.
    """
    lam = np.asarray(lam, dtype=float)
    pref = 2.0 * math.pi * math.sqrt(math.pi / a) * np.exp((1.0 - lam * lam) / (4.0 * a))
    z = lam / (2.0 * a)
    small = np.abs(z) < 1e-4
    zs = np.where(small, 1.0, z)
    ratio = np.where(small, 1.0 - z * z / 6.0, np.sin(zs) / zs)
    return pref * ratio / (2.0 * a)


def line_heat_abel(t, rho, s):
    """``e^{-t rho^2} (4 pi t)^{-1/2} e^{-s^2/4t}``."""
    s = np.asarray(s, dtype=float)
    return math.exp(-t * rho * rho) * (4.0 * math.pi * t) ** -0.5 * np.exp(-s * s / (4.0 * t))


def line_gaussian_ft(t, lam):
    """Fourier transform ``int e^{-i lambda s} e^{-s^2/4t} ds = sqrt(4 pi t) e^{-t lambda^2}``."""
    lam = np.asarray(lam, dtype=float)
    return math.sqrt(4.0 * math.pi * t) * np.exp(-t * lam * lam)


def line_schrodinger_rate(a, t0):
    """Gaussian rate of ``|u(t0, .)|`` for free Schrodinger data ``e^{-a s^2}`` on the line."""
    return a / (1.0 + 16.0 * a * a * t0 * t0)
