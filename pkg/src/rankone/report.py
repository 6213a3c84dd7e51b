"""
Figures and tables for one model space.

Each panel is written as a CSV table and a PNG figure rendered with the
Agg canvas (no pyplot state).  The CSV files are the reference data; the
figures are a convenience view of the same numbers.
"""

from __future__ import annotations

import io
import math
from pathlib import Path

import numpy as np
from matplotlib import rc_context
from matplotlib.figure import Figure

from .eigenfunctions import phi_table
from .kernels import heat_kernel, heat_l2_norm
from .output import csv_text, write_atomic
from .spectral_measure import PlancherelData
from .transforms import abel_transform, line_grid, radial_grid

__all__ = ["build_report", "FIGURE_STYLE"]

FIGURE_STYLE = {
    "figure.figsize": (5.0, 3.6),
    "figure.dpi": 120,
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.3,
}
HEAT_TIMES = (0.1, 0.5, 1.0)
ABEL_TIMES = (0.25, 1.0)
PHI_LAMBDAS = (0.0, 0.5, 1.0, 2.0, 5.0)


def _axes():
    fig = Figure()
    return fig, fig.subplots()


def _save(fig, path):
    buf = io.BytesIO()
    fig.savefig(buf, format="png", metadata={"Software": None})
    return write_atomic(path, buf.getvalue())


def _table(path, header, columns):
    return write_atomic(path, csv_text(header, zip(*columns)))


def _density_panel(pdata, out, n_lambda):
    lam = np.linspace(0.0, pdata.lambda_cutoff, n_lambda)
    dens = pdata.density(lam)
    files = [_table(out / "density.csv", ("lambda", "density"), (lam, dens))]
    fig, ax = _axes()
    pos = lam > 0
    ax.loglog(lam[pos], dens[pos], label=r"$|c(\lambda)|^{-2}$")
    a = pdata.space.alpha
    ref = dens[-1] * (lam[pos] / lam[-1]) ** (2 * a + 1)
    ax.loglog(lam[pos], ref, "--", color="0.5", label=rf"$\lambda^{{{2 * a + 1:g}}}$")
    ax.set_xlabel(r"$\lambda$")
    ax.set_ylabel("density")
    ax.set_title(f"Plancherel density on {pdata.space.label}")
    ax.legend(frameon=False)
    files.append(_save(fig, out / "density.png"))
    return files


def _phi_panel(pdata, out):
    space = pdata.space
    r = np.linspace(0.0, 12.0, 241)
    table = phi_table(space, np.array(PHI_LAMBDAS), r).real
    renorm = table * np.exp(space.rho * r)
    header = ("r", *(f"phi_{lam:g}" for lam in PHI_LAMBDAS))
    files = [_table(out / "eigenfunctions.csv", header, (r, *table))]
    fig, ax = _axes()
    for lam, row in zip(PHI_LAMBDAS, renorm):
        ax.plot(r, row, label=rf"$\lambda={lam:g}$")
    ax.set_xlabel("$r$")
    ax.set_ylabel(r"$e^{\rho r}\,\varphi_\lambda(r)$")
    ax.set_title(f"Spherical functions on {space.label}")
    ax.legend(frameon=False, ncol=2)
    files.append(_save(fig, out / "eigenfunctions.png"))
    return files


def _heat_panel(pdata, out):
    grid = radial_grid(8.0)
    r = grid.nodes
    rows = [heat_kernel(pdata, t, grid).values.real for t in HEAT_TIMES]
    header = ("r", *(f"h_{t:g}" for t in HEAT_TIMES))
    files = [_table(out / "heat_kernel.csv", header, (r, *rows))]
    fig, ax = _axes()
    for t, row in zip(HEAT_TIMES, rows):
        ax.semilogy(r, np.maximum(np.abs(row), 1e-300), label=f"t={t:g}")
    ax.set_ylim(bottom=1e-18)
    ax.set_xlabel("$r$")
    ax.set_ylabel("$h_t(r)$")
    ax.set_title(f"Heat kernel on {pdata.space.label}")
    ax.legend(frameon=False)
    files.append(_save(fig, out / "heat_kernel.png"))
    return files


def _heat_norm_panel(pdata, out):
    t = np.logspace(-2, 1.5, 36)
    norms = np.array([heat_l2_norm(pdata, x) for x in t])
    deflated = norms * np.exp(t * pdata.rho**2)
    files = [_table(out / "heat_l2.csv", ("t", "l2_norm", "deflated"), (t, norms, deflated))]
    fig, ax = _axes()
    ax.loglog(t, deflated, label=r"$e^{t\rho^2}\|h_t\|_2$")
    a = pdata.space.alpha
    ax.loglog(t[:8], deflated[0] * (t[:8] / t[0]) ** (-(a + 1) / 2), "--", color="0.5",
              label=rf"slope $-{(a + 1) / 2:g}$")
    ax.loglog(t[-8:], deflated[-1] * (t[-8:] / t[-1]) ** -0.75, ":", color="0.3", label="slope $-3/4$")
    ax.set_xlabel("$t$")
    ax.set_title(f"Heat kernel $L^2$ norm on {pdata.space.label}")
    ax.legend(frameon=False)
    files.append(_save(fig, out / "heat_l2.png"))
    return files


def _abel_panel(pdata, out, s_max):
    grid = line_grid(s_max)
    s = grid.nodes
    rho = pdata.rho
    rows, exact = [], []
    for t in ABEL_TIMES:
        rows.append(abel_transform(pdata, heat_kernel(pdata, t), grid).values.real)
        exact.append(math.exp(-t * rho * rho) * (4.0 * math.pi * t) ** -0.5 * np.exp(-s * s / (4.0 * t)))
    header = ("s", *(f"abel_h_{t:g}" for t in ABEL_TIMES), *(f"closed_form_{t:g}" for t in ABEL_TIMES))
    files = [_table(out / "abel.csv", header, (s, *rows, *exact))]
    fig, ax = _axes()
    for t, row, ex in zip(ABEL_TIMES, rows, exact):
        line, = ax.plot(s, row, label=f"t={t:g}")
        ax.plot(s[::8], ex[::8], "o", ms=3, color=line.get_color(), mfc="none")
    ax.set_xlabel("$s$")
    ax.set_ylabel(r"$\mathcal{R}h_t(s)$")
    ax.set_title(f"Abel images of heat kernels on {pdata.space.label}")
    ax.legend(frameon=False)
    files.append(_save(fig, out / "abel.png"))
    return files


def build_report(pdata: PlancherelData, out, s_max: float = 8.0, n_lambda: int = 600) -> list:
    """Write every panel under ``out``; returns the written paths."""
    out = Path(out)
    written = []
    with rc_context(FIGURE_STYLE):
        written += _density_panel(pdata, out, n_lambda)
        written += _phi_panel(pdata, out)
        written += _heat_panel(pdata, out)
        written += _heat_norm_panel(pdata, out)
        written += _abel_panel(pdata, out, s_max)
    return written
