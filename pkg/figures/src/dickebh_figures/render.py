"""Figure rendering for each dickebh CSV kind.

Rendering is read-only over its inputs and recomputes no physics: phase
boundaries are drawn as iso-contours of the tabulated order parameter, and
the zero-hopping boundary markers come from the CSV's JSON sidecar.
"""

from dataclasses import dataclass, field
import math
from pathlib import Path

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .io import EXPECTED_HEADERS, SchemaError, read_table, column, phase_grid, read_sidecar
from .style import load_style

__all__ = ["FigureJob", "RenderInfo", "SchemaError", "render", "render_multi_panel"]

PSI_LEVEL = 1e-4  # matches the solver's phase threshold
PSI_FLOOR = 1e-12
LOBE_LABELS = ["$|0,0\\rangle$", "$|-,1\\rangle$", "$|-,2\\rangle$"]


@dataclass(frozen=True)
class FigureJob:
    input_csv: str
    figure_kind: str  # one of EXPECTED_HEADERS
    output_image: str
    title: str | None = None
    xlabel: str | None = None
    ylabel: str | None = None
    style_file: str | None = None

    def __post_init__(self):
        if self.figure_kind not in EXPECTED_HEADERS:
            raise ValueError(
                f"unknown figure kind {self.figure_kind!r}; "
                f"expected one of {sorted(EXPECTED_HEADERS)}"
            )


@dataclass
class RenderInfo:
    """What was drawn, for callers that verify overlays numerically."""

    output_image: str
    boundary_intercepts: list = field(default_factory=list)  # contour mu at the low-kappa edge
    marker_positions: list = field(default_factory=list)  # sidecar zero-hopping boundaries
    lobe_labels_drawn: list = field(default_factory=list)


def _new_axes(style):
    fig, ax = plt.subplots(figsize=style["figure_size"], dpi=style["dpi"])
    for item in (ax.title, ax.xaxis.label, ax.yaxis.label):
        item.set_fontsize(style["font_size"])
    return fig, ax


def _finish(fig, ax, job, style, default_title, default_x, default_y):
    ax.set_title(job.title or default_title)
    ax.set_xlabel(job.xlabel or default_x)
    ax.set_ylabel(job.ylabel or default_y)
    fig.tight_layout()
    fig.savefig(job.output_image)
    plt.close(fig)


def _render_spectrum(job, table, style, info):
    fig, ax = _new_axes(style)
    n_values = sorted({int(float(v)) for v in table["n"]})
    n_col = column(table, "n").astype(int)
    x = column(table, "omega_over_beta")
    for n in n_values:
        sel = n_col == n
        for branch, color in style["branch_colors"].items():
            y = column(table, branch)[sel]
            ax.plot(x[sel], y, color=color, lw=style["line_width"],
                    label=branch.replace("e_", "") if n == n_values[-1] else None)
    ax.legend(fontsize=style["font_size"] - 1, title="branch")
    _finish(fig, ax, job, style, "Dressed branch energies",
            r"$\omega/\beta$", r"$E/\beta$")


def _render_rabi(job, table, style, info):
    fig, ax = _new_axes(style)
    n_col = column(table, "n").astype(int)
    x = column(table, "omega_over_beta")
    r = column(table, "R")
    for n in sorted(set(n_col)):
        sel = n_col == n
        ax.plot(x[sel], r[sel], lw=style["line_width"], label=f"n={n}")
    ax.legend(fontsize=style["font_size"] - 1)
    _finish(fig, ax, job, style, "Effective Rabi splitting",
            r"$\omega/\beta$", r"$R(n,\omega/\beta)$")


def _render_mu_crit(job, table, style, info):
    fig, ax = _new_axes(style)
    n_col = column(table, "n").astype(int)
    x = column(table, "omega_over_beta")
    many_x = len(set(x)) > 1
    for series, marker in (("mu_c_eq10", "o"), ("mu_c_degeneracy", "s")):
        y = column(table, series)
        if many_x:
            for n in sorted(set(n_col)):
                sel = n_col == n
                ax.plot(x[sel], y[sel], marker=marker, ms=3,
                        lw=style["line_width"], label=f"{series}, n={n}")
        else:
            ax.plot(n_col, y, marker=marker, lw=style["line_width"], label=series)
    ax.legend(fontsize=style["font_size"] - 2)
    _finish(fig, ax, job, style, "Critical chemical potential",
            r"$\omega/\beta$" if many_x else "n", r"$\mu_c/\beta$")


def _render_convergence(job, table, style, info):
    fig, ax = _new_axes(style)
    ax.plot(column(table, "n_max"), column(table, "e_ground"),
            marker="o", ms=4, lw=style["line_width"])
    _finish(fig, ax, job, style, "Ground-energy convergence",
            "photon cutoff", r"$E_g/\beta$")


def _phase_panel(ax, table, style, info, csv_path, show_labels):
    kappas, mus, fields = phase_grid(table)
    logpsi = np.log10(fields["psi_min"] + PSI_FLOOR)
    mesh = ax.pcolormesh(kappas, mus, logpsi.T, cmap=style["colormap"], shading="nearest")
    level = math.log10(PSI_LEVEL)
    if logpsi.min() < level < logpsi.max():
        cs = ax.contour(kappas, mus, logpsi.T, levels=[level],
                        colors=style["contour_color"], linewidths=style["contour_width"])
        for seg in cs.allsegs[0]:
            near_edge = seg[seg[:, 0] <= kappas[min(1, len(kappas) - 1)]]
            info.boundary_intercepts.extend(float(v) for v in near_edge[:, 1])
    sidecar = read_sidecar(csv_path)
    if sidecar and "zero_hopping_boundaries" in sidecar:
        marker_mus = [b["mu_rel"] for b in sidecar["zero_hopping_boundaries"]]
        info.marker_positions = [float(v) for v in marker_mus]
        ax.scatter(np.zeros(len(marker_mus)) + kappas[0], marker_mus,
                   marker=style["marker_symbol"], s=style["marker_size"],
                   color=style["marker_color"], zorder=5, clip_on=False)
    if show_labels and sidecar and sidecar.get("lobes"):
        lobes = [l for l in sidecar["lobes"] if l.get("mu_rel_interval")][:3]
        for label, lobe in zip(LOBE_LABELS, lobes):
            lo, hi = lobe["mu_rel_interval"]
            ax.text(kappas[0] + 0.06 * (kappas[-1] - kappas[0]), 0.5 * (lo + hi), label,
                    color=style["label_color"], fontsize=style["font_size"],
                    va="center")
            info.lobe_labels_drawn.append(label)
    return mesh


def _render_phase(job, table, style, info, density=False):
    fig, ax = _new_axes(style)
    if density:
        kappas, mus, fields = phase_grid(table)
        mesh = ax.pcolormesh(kappas, mus, fields["rho"].T, cmap=style["colormap"],
                             shading="nearest")
        fig.colorbar(mesh, ax=ax, label=r"$\rho$")
    else:
        mesh = _phase_panel(ax, table, style, info, job.input_csv, show_labels=True)
        fig.colorbar(mesh, ax=ax, label=r"$\log_{10}\,\psi$")
    _finish(fig, ax, job, style,
            "Mean excitations" if density else "Mean-field phase diagram",
            r"$\kappa/\beta$", r"$(\mu-\omega)/\beta$")


_RENDERERS = {
    "spectrum": _render_spectrum,
    "rabi": _render_rabi,
    "mu_crit": _render_mu_crit,
    "convergence": _render_convergence,
    "phase_diagram": lambda job, table, style, info: _render_phase(job, table, style, info),
    "density": lambda job, table, style, info: _render_phase(job, table, style, info, density=True),
}


def render(job: FigureJob) -> RenderInfo:
    """Render one figure; raises SchemaError before writing anything on bad input."""
    if job.figure_kind == "multi_N_panel":
        return render_multi_panel([job])
    style = load_style(job.style_file)
    table = read_table(job.input_csv, job.figure_kind)
    info = RenderInfo(output_image=job.output_image)
    _RENDERERS[job.figure_kind](job, table, style, info)
    return info


def render_multi_panel(jobs, force=False, output_image=None) -> RenderInfo:
    """Shared-axes panel grid of 1-6 phase diagrams, panels labeled by atom number."""
    if not 1 <= len(jobs) <= 6:
        raise ValueError(f"need between 1 and 6 phase-diagram inputs, got {len(jobs)}")
    style = load_style(jobs[0].style_file)
    out = output_image or jobs[0].output_image
    tables = [read_table(j.input_csv, "phase_diagram") for j in jobs]
    ranges = []
    for table in tables:
        kappa = column(table, "kappa_over_beta")
        mu = column(table, "mu_rel")
        ranges.append((kappa.min(), kappa.max(), mu.min(), mu.max()))
    if not force and len({tuple(np.round(r, 12)) for r in ranges}) > 1:
        raise ValueError(
            "axis ranges differ between panels; pass force=True (--force) to union them"
        )

    ncol = min(len(jobs), 3)
    nrow = (len(jobs) + ncol - 1) // ncol
    fig, axes = plt.subplots(
        nrow, ncol, squeeze=False,
        figsize=(style["panel_size"][0] * ncol, style["panel_size"][1] * nrow),
        dpi=style["dpi"], sharex=force is False, sharey=force is False,
    )
    info = RenderInfo(output_image=out)
    for k, (job, table) in enumerate(zip(jobs, tables)):
        ax = axes[k // ncol][k % ncol]
        _phase_panel(ax, table, style, info, job.input_csv, show_labels=False)
        sidecar = read_sidecar(job.input_csv)
        atoms = (sidecar or {}).get("params", {}).get("atoms")
        ax.set_title(job.title or (f"N = {atoms}" if atoms else Path(job.input_csv).stem),
                     fontsize=style["font_size"])
        ax.set_xlabel(r"$\kappa/\beta$")
        ax.set_ylabel(r"$(\mu-\omega)/\beta$")
    for k in range(len(jobs), nrow * ncol):
        axes[k // ncol][k % ncol].set_axis_off()
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)
    return info
