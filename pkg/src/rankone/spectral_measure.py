"""
The ``c``-function, the Plancherel density ``|c(lambda)|^{-2}`` and ``C0``.

For real ``lambda > 0`` and large ``r``

    e^{rho r} phi_lambda(r) = c(lambda) e^{i lambda r} + conj(c(lambda)) e^{-i lambda r} + O(e^{-2r}),

so two samples a quarter period apart determine ``c`` through an
orthogonal 2x2 system.  The density is tabulated on Gauss-Legendre panels and
interpolated panel-wise; below ``LAMBDA_MIN`` it is continued as
``lambda^2 g(lambda)`` with ``g`` the first-panel interpolant of
``|c|^{-2} / lambda^2``.
"""

from __future__ import annotations

import dataclasses
import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .eigenfunctions import DEFAULT_TOL, renormalized_table
from .model_space import ModelSpace
from .quadrature import PanelGrid, panel_breaks, panel_grid

__all__ = [
    "LAMBDA_MIN",
    "DEFAULT_LAMBDA_MAX",
    "DEFAULT_RADIUS",
    "ExtractionError",
    "CalibrationError",
    "PlancherelData",
    "extract_c",
    "extract_c_batch",
    "plancherel_density",
    "calibrate_C0",
    "heat_calibration",
    "build_plancherel",
]

LAMBDA_MIN = 0.05
DEFAULT_LAMBDA_MAX = 60.0
DEFAULT_RADIUS = 35.0
ESCALATED_RADIUS = 45.0
STABILITY_SHIFT = 5.0
TABLE_WIDTH = 2.0
# |c|^{-2} can have poles at distance 1/2 from the real axis; narrower panels
# near the origin keep the interpolant accurate there
NEAR_EDGE = 4.0 + LAMBDA_MIN
NEAR_WIDTH = 0.5
TABLE_ORDER = 16
QUAD_WIDTH = 0.5
QUAD_ORDER = 16
EXTENSION_CHUNK = 20.0
_BLOCK = 128


class ExtractionError(RuntimeError):
    """The asymptotic fit for ``c(lambda)`` did not stabilize."""


class CalibrationError(RuntimeError):
    """Test functions disagree on ``C0``."""


def _solve_pairs(e1, e2, theta):
    # e^{rho r} phi = 2 Re(c e^{i theta}) sampled at theta and theta + pi/2
    cs, sn = np.cos(theta), np.sin(theta)
    return 0.5 * (e1 * cs - e2 * sn) + 0.5j * (-e1 * sn - e2 * cs)


def _extract_block(space, lam, R, tol):
    """``c`` at radii ``R`` and ``R + 5`` for one block."""
    quarter = 0.5 * math.pi / lam
    radii = np.concatenate([np.full(lam.size, R), R + quarter, np.full(lam.size, R + STABILITY_SHIFT),
                            R + STABILITY_SHIFT + quarter])
    nodes, inv = np.unique(radii, return_inverse=True)
    table = renormalized_table(space, lam, nodes, tol=tol)
    idx = inv.reshape(4, lam.size)
    rows = np.arange(lam.size)
    e = [table[rows, idx[j]] for j in range(4)]
    c1 = _solve_pairs(e[0], e[1], lam * R)
    c2 = _solve_pairs(e[2], e[3], lam * (R + STABILITY_SHIFT))
    return c1, c2


def extract_c_batch(
    space: ModelSpace,
    lam,
    R: float = DEFAULT_RADIUS,
    tol: float = 1e-6,
    ode_tol: float = DEFAULT_TOL,
    escalate: bool = True,
    diagnostics: dict | None = None,
) -> np.ndarray:
    """``c(lambda)`` for an array of real ``lambda >= LAMBDA_MIN``.

    Each value is accepted when the fits at ``R`` and ``R + 5`` agree to
    ``tol`` relative; otherwise the radius is escalated to 45 once.

    Raises
    ------
    ValueError
        For ``lambda < LAMBDA_MIN`` (the quarter-period system degenerates).
    ExtractionError
        If the fit is still unstable after escalation.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if lam.size and not np.all(np.isfinite(lam)):
        raise ValueError("lambda must be finite")
    if lam.size and lam.min() < LAMBDA_MIN:
        raise ValueError(
            f"lambda={lam.min():.3g} below LAMBDA_MIN={LAMBDA_MIN}: the two sample points "
            f"are {0.5 * math.pi / lam.min():.1f} apart and the asymptotic fit is ill-conditioned"
        )
    out = np.empty(lam.size, dtype=complex)
    spread = np.zeros(lam.size)
    radius_used = np.full(lam.size, float(R))
    order = np.argsort(lam, kind="stable")
    for i in range(0, lam.size, _BLOCK):
        idx = order[i : i + _BLOCK]
        c1, c2 = _extract_block(space, lam[idx], R, ode_tol)
        rel = np.abs(c1 - c2) / np.abs(c1)
        bad = rel > tol
        if bad.any() and escalate and R < ESCALATED_RADIUS:
            e1, e2 = _extract_block(space, lam[idx][bad], ESCALATED_RADIUS, ode_tol)
            c1[bad] = e1
            rel[bad] = np.abs(e1 - e2) / np.abs(e1)
            radius_used[idx[bad]] = ESCALATED_RADIUS
        out[idx] = c1
        spread[idx] = rel
    if diagnostics is not None:
        diagnostics["stability"] = spread
        diagnostics["radius"] = radius_used
        diagnostics["condition"] = 1.0
    worst = int(np.argmax(spread)) if lam.size else 0
    if lam.size and spread[worst] > tol:
        raise ExtractionError(
            f"c({lam[worst]:.4g}) unstable: relative change {spread[worst]:.2e} between "
            f"R={radius_used[worst]:g} and R+{STABILITY_SHIFT:g} exceeds {tol:g}"
        )
    return out


def extract_c(space: ModelSpace, lam: float, R: float = DEFAULT_RADIUS, tol: float = 1e-6) -> complex:
    """``c(lambda)`` for one real ``lambda >= LAMBDA_MIN``."""
    if np.iscomplexobj(lam) and np.imag(lam) != 0:
        raise ValueError("c-function extraction is only defined for real lambda")
    return complex(extract_c_batch(space, [float(np.real(lam))], R=R, tol=tol)[0])


@dataclass
class PlancherelData:
    """Tabulated Plancherel density with its normalization.

    Attributes
    ----------
    space : ModelSpace
    lambda_grid, density_values : ndarray
        Requested nodes and ``|c|^{-2}`` there.
    C0 : float
        Inversion constant (``nan`` until calibrated).
    calibration_residual : float
        Relative spread of ``C0`` across the calibration functions.
    extraction_radius : float
    lambda_cutoff : float
        Nominal spectral cutoff used by default quadratures; the table itself
        may reach further after :meth:`extend`.
    kappa : float
        Limit of ``|c(lambda)|^{-2} / lambda^2`` at ``lambda = 0``.
    provenance : dict
    """

    space: ModelSpace
    lambda_grid: np.ndarray
    density_values: np.ndarray
    C0: float
    calibration_residual: float
    extraction_radius: float
    lambda_cutoff: float
    kappa: float
    table: PanelGrid
    table_values: np.ndarray
    provenance: dict = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    @property
    def lambda_max(self) -> float:
        return float(self.table.breaks[-1])

    @property
    def rho(self) -> float:
        return self.space.rho

    def extend(self, lam_max: float) -> "PlancherelData":
        """Grow the table to ``lam_max`` in place; existing values are untouched."""
        with self._lock:
            # fixed-size chunks keep the table independent of the call history
            while self.lambda_max < lam_max:
                old = self.lambda_max
                new_breaks = panel_breaks(old, old + EXTENSION_CHUNK, TABLE_WIDTH)
                extra = panel_grid(new_breaks, TABLE_ORDER)
                c = extract_c_batch(self.space, extra.nodes, R=self.extraction_radius)
                breaks = np.concatenate([self.table.breaks, new_breaks[1:]])
                self.table = panel_grid(breaks, TABLE_ORDER)
                self.table_values = np.concatenate([self.table_values, np.abs(c) ** -2.0])
        return self

    def density(self, lam) -> np.ndarray:
        """``|c(lambda)|^{-2}`` at ``|lambda|``, extending the table if needed."""
        lam = np.abs(np.asarray(lam, dtype=float))
        if lam.size and lam.max() > self.lambda_max:
            self.extend(float(lam.max()))
        out = np.empty(lam.shape)
        low = lam < LAMBDA_MIN
        if low.any():
            # density / lambda^2 is even and smooth, so its first panel
            # extrapolates accurately over the short gap to the origin
            ratio = self.table_values / self.table.nodes**2
            out[low] = lam[low] ** 2 * self.table.interpolate(ratio, lam[low])
        if (~low).any():
            out[~low] = self.table.interpolate(self.table_values, lam[~low])
        return out

    def quadrature(self, lam_max: float | None = None, width: float = QUAD_WIDTH,
                   order: int = QUAD_ORDER) -> PanelGrid:
        """Default spectral rule on ``[0, lam_max]`` with a break at ``LAMBDA_MIN``."""
        top = self.lambda_cutoff if lam_max is None else float(lam_max)
        return panel_grid(panel_breaks(0.0, top, width, anchors=(LAMBDA_MIN,)), order)

    def with_calibration(self, C0: float, residual: float, provenance: dict) -> "PlancherelData":
        prov = dict(self.provenance)
        prov.update(provenance)
        return dataclasses.replace(self, C0=float(C0), calibration_residual=float(residual),
                                   provenance=prov, _lock=threading.Lock())

    def header(self) -> dict:
        return {
            "space": self.space.descriptor(),
            "C0": self.C0,
            "calibration_residual": self.calibration_residual,
            "extraction_radius": self.extraction_radius,
            "lambda_min": LAMBDA_MIN,
            "lambda_max": self.lambda_cutoff,
            "kappa": self.kappa,
        }


def _table_breaks(lam_max: float) -> np.ndarray:
    near = panel_breaks(LAMBDA_MIN, NEAR_EDGE, NEAR_WIDTH)
    return np.concatenate([near, panel_breaks(NEAR_EDGE, lam_max, TABLE_WIDTH)[1:]])


def plancherel_density(
    space: ModelSpace,
    lambda_grid=None,
    lam_max: float = DEFAULT_LAMBDA_MAX,
    R: float = DEFAULT_RADIUS,
) -> PlancherelData:
    """Tabulate ``|c|^{-2}`` on ``[LAMBDA_MIN, lam_max]`` (``C0`` left unset).

    ``lambda_grid`` (optional) are extra nodes reported in
    ``lambda_grid``/``density_values``; the table is extended to cover them.
    """
    if lambda_grid is not None:
        lambda_grid = np.asarray(lambda_grid, dtype=float)
        if np.any(lambda_grid < 0) or not np.all(np.isfinite(lambda_grid)):
            raise ValueError("lambda grid must be finite and non-negative")
        if lambda_grid.size:
            lam_max = max(lam_max, float(lambda_grid.max()))
    if lam_max < 10.0:
        raise ValueError("lambda_max must be at least 10")
    grid = panel_grid(_table_breaks(lam_max), TABLE_ORDER)
    c = extract_c_batch(space, grid.nodes, R=R)
    vals = np.abs(c) ** -2.0
    kappa = float(grid.interpolate(vals / grid.nodes**2, 0.0))
    pdata = PlancherelData(
        space=space,
        lambda_grid=grid.nodes,
        density_values=vals,
        C0=float("nan"),
        calibration_residual=float("nan"),
        extraction_radius=float(R),
        lambda_cutoff=float(lam_max),
        kappa=float(kappa),
        table=grid,
        table_values=vals,
        provenance={"fill": "lambda^2 times first-panel extrapolation of density/lambda^2"},
    )
    if lambda_grid is not None:
        pdata.lambda_grid = lambda_grid
        pdata.density_values = pdata.density(lambda_grid)
    return pdata


def calibrate_C0(space: ModelSpace, pdata: PlancherelData, test_functions=None,
                 max_spread: float = 1e-3) -> PlancherelData:
    """Fix ``C0`` from ``u(0) = C0 int u_hat(lambda) |c|^{-2} d lambda``.

    Parameters
    ----------
    test_functions : sequence of float, optional
        Gaussian rates ``a`` of ``u(r) = e^{-a r^2}``; default ``(0.5, 1, 2)``.
    """
    from .transforms import gaussian, spherical_ft

    rates = (0.5, 1.0, 2.0) if test_functions is None else tuple(float(a) for a in test_functions)
    if len(rates) < 3:
        raise ValueError("at least three calibration functions are required")
    values = []
    for a in rates:
        f = gaussian(space, a)
        fh = spherical_ft(space, f, pdata)
        integral = fh.integrate(pdata.density(fh.lam) * fh.values.real)
        values.append(1.0 / integral)
    values = np.array(values)
    C0 = float(values.mean())
    spread = float((values.max() - values.min()) / C0)
    if spread > max_spread:
        raise CalibrationError(f"C0 spread {spread:.2e} across Gaussians {rates} exceeds {max_spread:g}")
    return pdata.with_calibration(C0, spread, {"C0_method": "gaussian", "C0_rates": list(rates),
                                               "C0_values": values.tolist()})


def heat_calibration(pdata: PlancherelData, times=(0.25, 0.5, 1.0), tail_budget: float = 1e-4) -> np.ndarray:
    """``C0`` implied by unit heat mass, one value per time.

    ``tail_budget`` is passed to :func:`rankone.transforms.lp_norm`.
    """
    from .kernels import heat_kernel
    from .transforms import lp_norm

    uncal = dataclasses.replace(pdata, C0=1.0, _lock=threading.Lock())
    out = []
    for t in times:
        h = heat_kernel(uncal, t)
        out.append(1.0 / lp_norm(pdata.space, h, 1.0, tail_budget))
    return np.array(out)


_built: dict = {}
_built_lock = threading.Lock()


def build_plancherel(space: ModelSpace, lam_max: float = DEFAULT_LAMBDA_MAX) -> PlancherelData:
    """Tabulated and calibrated data, memoized per ``(space, lam_max)``."""
    key = (space, float(lam_max))
    with _built_lock:
        hit = _built.get(key)
    if hit is not None:
        return hit
    pdata = calibrate_C0(space, plancherel_density(space, lam_max=lam_max))
    with _built_lock:
        _built.setdefault(key, pdata)
        return _built[key]
