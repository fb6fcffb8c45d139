"""Figures for the CLI reports, written with the non-interactive Agg backend."""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = ["publication_rc", "render", "render_sweep"]


def publication_rc(width: float = 5.0, height: float | None = None) -> dict:
    """rcParams for compact single-column figures."""
    if height is None:
        height = width * (math.sqrt(5) - 1) / 2
    return {
        "figure.figsize": (width, height),
        "figure.dpi": 150,
        "savefig.dpi": 150,
        "savefig.bbox": "tight",
        "font.size": 9,
        "axes.labelsize": 9,
        "axes.titlesize": 9,
        "legend.fontsize": 8,
        "legend.frameon": False,
        "xtick.labelsize": 8,
        "ytick.labelsize": 8,
        "xtick.direction": "in",
        "ytick.direction": "in",
        "lines.linewidth": 1.2,
        "lines.markersize": 3.5,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "svg.hashsalt": "hm-lab",
    }


def _positive(y):
    y = np.asarray(y, dtype=float)
    return np.where(y > 0, y, np.nan)


def _save(fig, outdir: str, name: str) -> str:
    path = os.path.join(outdir, name)
    fig.savefig(path, metadata={"Software": None})
    return path


def _curvature(plt, s):
    fig, ax = plt.subplots()
    ax.loglog(s["r"], _positive(s["numeric_error"]), "o-", label="finite differences")
    ax.loglog(s["r"], _positive(s["closed_error"]), "s", label="closed form")
    ax.set_xlabel("r")
    ax.set_ylabel("|S - S_expected|")
    ax.legend()
    return [("curvature_scalar_error.png", fig)]


def _regularity(plt, s):
    fig, ax = plt.subplots()
    ax.loglog(s["rho"], _positive(s["ratio_minus_one"]), "o-")
    ax.set_xlabel("rho")
    ax.set_ylabel("|circumference / (2 pi R) - 1|")
    return [("regularity_cone_ratio.png", fig)]


def _static(plt, s):
    fig, ax = plt.subplots()
    table = np.asarray(s["table"])
    for j, name in enumerate(s["components"]):
        if name.startswith("theta") and name != "theta1":
            continue
        ax.loglog(s["r"], _positive(table[:, j]), label=name)
    ax.set_xlabel("r")
    ax.set_ylabel("|vacuum residual|")
    ax.legend()
    return [("static_residuals.png", fig)]


def _complex(plt, s):
    fig, (a1, a2) = plt.subplots(1, 2, figsize=(7.0, 2.6))
    a1.semilogy(s["r"], _positive(s["nijenhuis"]), "o-")
    a1.set_xlabel("r")
    a1.set_ylabel("max |N|")
    a2.loglog(s["rho"], _positive(s["A_deviation"]), "o-")
    a2.set_xlabel("rho")
    a2.set_ylabel("max |A - rotation|")
    fig.tight_layout()
    return [("complex_structure.png", fig)]


def _energy(plt, s):
    fig, (a1, a2) = plt.subplots(1, 2, figsize=(7.0, 2.6))
    a1.loglog(s["r"], _positive(s["mass_error"]), "o-")
    a1.set_xlabel("r")
    a1.set_ylabel("|E_HH(r) - E_HH|")
    a2.loglog(s["tail_r"], _positive(s["tail_remainder"]), "o-")
    a2.set_xlabel("r")
    a2.set_ylabel("|E r^n + r0^n / ell|")
    fig.tight_layout()
    return [("energy_convergence.png", fig)]


_DRAW = {
    "curvature": _curvature,
    "regularity": _regularity,
    "static-check": _static,
    "complex": _complex,
    "energy": _energy,
}


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return matplotlib, plt


def render(command: str, series: dict, outdir: str) -> list[str]:
    """Write the figures of one pipeline run; returns the written paths."""
    matplotlib, plt = _pyplot()
    os.makedirs(outdir, exist_ok=True)
    jobs = [(command, series)] if command != "verify-all" else list(series.items())
    paths = []
    with matplotlib.rc_context(publication_rc()):
        for name, s in jobs:
            if name not in _DRAW or not s:
                continue
            for fname, fig in _DRAW[name](plt, s):
                paths.append(_save(fig, outdir, fname))
                plt.close(fig)
    return paths


def render_sweep(command: str, param: str, rows: list[dict], outdir: str) -> list[str]:
    """One panel per numeric result column against the swept parameter."""
    matplotlib, plt = _pyplot()
    os.makedirs(outdir, exist_ok=True)
    x = [row[param] for row in rows]
    keys = [
        k
        for k, v in rows[0].items()
        if k != param
        and isinstance(v, float)
        and all(isinstance(r.get(k), float) for r in rows)
        and len({r[k] for r in rows}) > 1
    ]
    paths = []
    with matplotlib.rc_context(publication_rc()):
        for k in keys:
            fig, ax = plt.subplots()
            ax.plot(x, [row[k] for row in rows], "o-")
            ax.set_xlabel(param)
            ax.set_ylabel(k)
            safe = k.replace(".", "_")
            paths.append(_save(fig, outdir, f"{command}_sweep_{param}_{safe}.png"))
            plt.close(fig)
    return paths
