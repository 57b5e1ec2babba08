"""Figure rendering: phase diagram, complex-time map, pulse contour.

Pure file-to-file transformations over the simulator's CSV/JSON outputs.
Figures carry no timestamps, so identical inputs produce identical bytes.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# content-derived SVG element ids instead of per-process ones, so identical
# inputs yield byte-identical files
matplotlib.rcParams["svg.hashsalt"] = "epplots"
from matplotlib.colors import LogNorm  # noqa: E402

from .schema import (  # noqa: E402
    SchemaError,
    read_contour,
    read_dyn_eps,
    read_field,
    read_separatrix,
    read_sweep,
)

#: savefig metadata that suppresses embedded dates for reproducible bytes
_NO_DATE = {"Date": None}


@dataclass(frozen=True)
class FigureSpec:
    """Inputs, output base path, and styling for one figure.

    ``out_base`` is extended with .png and .svg.  Input paths are optional
    per figure kind; the plot functions state which ones they need.
    """

    out_base: str
    sweep_path: str | None = None
    separatrix_path: str | None = None
    dyn_eps_path: str | None = None
    field_path: str | None = None
    contour_path: str | None = None
    cmap: str = "viridis"
    log_scale: bool = False
    annotate: bool = True
    dpi: int = 150
    marked_points: tuple = ()  # ((alpha, eps_ratio, label), ...)
    formats: tuple = ("png", "svg")


def _require(spec: FigureSpec, attr: str) -> str:
    path = getattr(spec, attr)
    if path is None:
        raise SchemaError(f"figure needs {attr} but none was given")
    if not os.path.exists(path):
        raise SchemaError(f"{attr} {path!r} does not exist")
    return path


def _save(fig, spec: FigureSpec) -> list[str]:
    written = []
    for ext in spec.formats:
        out = f"{spec.out_base}.{ext}"
        fig.savefig(out, dpi=spec.dpi, metadata=_NO_DATE,
                    bbox_inches="tight")
        written.append(out)
    plt.close(fig)
    return written


def plot_phase_diagram(spec: FigureSpec) -> list[str]:
    """Survival-probability heatmap over (chirp, peak strength).

    Needs ``sweep_path``; ``separatrix_path`` adds the critical curve, and
    ``marked_points`` adds labelled markers.
    """
    table = read_sweep(_require(spec, "sweep_path"))
    eps_axis, alpha_axis, grid = table.pivot("p_bound_exact")
    if grid.size == 0:
        raise SchemaError(f"{spec.sweep_path}: sweep table is empty")

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    norm = LogNorm(vmin=max(np.nanmin(grid[grid > 0]), 1e-12),
                   vmax=1.0) if spec.log_scale else None
    mesh = ax.pcolormesh(alpha_axis, eps_axis, grid, cmap=spec.cmap,
                         norm=norm, shading="nearest",
                         vmin=None if spec.log_scale else 0.0,
                         vmax=None if spec.log_scale else 1.0)
    fig.colorbar(mesh, ax=ax, label="survival probability")

    if spec.separatrix_path is not None:
        curve = read_separatrix(_require(spec, "separatrix_path"))
        order = np.argsort(curve.alpha)
        ax.plot(curve.alpha[order], curve.eps0_crit_ratio[order],
                color="white", lw=1.6, ls="--", label="separatrix")
        if spec.annotate:
            ax.legend(loc="upper right", framealpha=0.6)

    for alpha, eps_ratio, label in spec.marked_points:
        ax.plot([alpha], [eps_ratio], marker="o", ms=5, color="red")
        if spec.annotate and label:
            ax.annotate(label, (alpha, eps_ratio), color="red",
                        textcoords="offset points", xytext=(4, 4))

    ax.set_xlabel(r"$|\alpha|$")
    ax.set_ylabel(r"$\varepsilon_0^{max} / \varepsilon_0^{EP}$")
    phi = table.metadata.get("spec", {}).get("phi")
    if spec.annotate and phi is not None:
        ax.set_title(rf"fixed pulse area $\varphi$ = {phi:.4g}")
    return _save(fig, spec)


def plot_complex_time_map(spec: FigureSpec) -> list[str]:
    """Log-magnitude of the energy split over complex t/tau with root markers.

    Needs ``field_path``; ``dyn_eps_path`` adds the dynamical-EP markers (an
    empty record list renders the field alone).
    """
    fld = read_field(_require(spec, "field_path"))
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    floor = max(float(fld.abs_split[fld.abs_split > 0].min(initial=1e-300)),
                1e-300)
    logmag = np.log10(np.maximum(fld.abs_split.T, floor))
    mesh = ax.pcolormesh(fld.re_axis, fld.im_axis, logmag, cmap=spec.cmap,
                         shading="nearest")
    fig.colorbar(mesh, ax=ax, label=r"$\log_{10}$ |energy split|")

    if spec.dyn_eps_path is not None:
        recs = read_dyn_eps(_require(spec, "dyn_eps_path"))
        if len(recs.t):
            ax.plot(recs.t.real, recs.t.imag, "o", ms=6, mfc="none",
                    mec="red", mew=1.4, label="dynamical EPs")
            if spec.annotate:
                ax.legend(loc="upper right", framealpha=0.6)

    ax.axhline(0.0, color="white", lw=0.6, alpha=0.5)
    ax.set_xlabel(r"Re $t/\tau$")
    ax.set_ylabel(r"Im $t/\tau$")
    return _save(fig, spec)


def plot_pulse_contour(spec: FigureSpec) -> list[str]:
    """Pulse trajectory in the (frequency, strength) plane with the cw EP."""
    table = read_contour(_require(spec, "contour_path"))
    fig, ax = plt.subplots(figsize=(5.0, 4.5))
    ax.plot(table.omega, table.eps0, color="C0", lw=1.5)
    # direction arrows at the quarter points
    n = len(table.omega)
    for i in (n // 4, 3 * n // 4):
        ax.annotate("", xy=(table.omega[i + 1], table.eps0[i + 1]),
                    xytext=(table.omega[i], table.eps0[i]),
                    arrowprops=dict(arrowstyle="->", color="C0"))
    omega_ep = table.metadata.get("omega_ep")
    eps0_ep = table.metadata.get("eps0_ep")
    if omega_ep is not None and eps0_ep is not None:
        ax.plot([omega_ep], [eps0_ep], marker="*", ms=12, color="red")
        if spec.annotate:
            ax.annotate("EP", (omega_ep, eps0_ep), color="red",
                        textcoords="offset points", xytext=(6, 4))
    ax.set_xlabel(r"$\omega$ (a.u.)")
    ax.set_ylabel(r"$\varepsilon_0$ (a.u.)")
    return _save(fig, spec)
