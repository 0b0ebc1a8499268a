"""Matplotlib rendering of the emitted data, written next to the data files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_PNG_META = {"Software": "cnotsim"}
_POP_LABELS = (r"$\rho_{00}$", r"$\rho_{11}$", r"$\rho_{22}$", r"$\rho_{33}$")


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata=_PNG_META)
    plt.close(fig)
    return path


def plot_series(path, x, series, xlabel, ylabel, title=""):
    """Generic line plot; ``series`` maps legend label to y-array."""
    fig, ax = plt.subplots(figsize=(6.0, 3.8))
    for label, y in series.items():
        ax.plot(x, y, label=label, lw=1.4)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(alpha=0.3)
    ax.legend(frameon=False)
    return _save(fig, Path(path))


def plot_population_panels(path, panels, xlabel):
    """Stacked panels of the four populations vs area; one panel per envelope."""
    fig, axes = plt.subplots(
        len(panels), 1, figsize=(6.4, 3.0 * len(panels)), sharex=False, squeeze=False
    )
    for ax, (title, areas, pops) in zip(axes[:, 0], panels):
        for k in range(4):
            ax.plot(areas, pops[:, k], label=_POP_LABELS[k], lw=1.3)
        ax.set_title(title)
        ax.set_ylabel("population")
        ax.grid(alpha=0.3)
        ax.legend(frameon=False, ncol=4, fontsize=8)
    axes[-1, 0].set_xlabel(xlabel)
    return _save(fig, Path(path))


def plot_tomograms(path, tomograms):
    """Grid of tomogram heat maps; ``tomograms`` is a list of (label, Tomogram)."""
    n = len(tomograms)
    cols = 4
    rows = (n + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(2.6 * cols, 2.6 * rows), squeeze=False)
    ticks = ("00", "01", "10", "11")
    for idx, (label, tomo) in enumerate(tomograms):
        ax = axes[idx // cols][idx % cols]
        im = ax.imshow(tomo.populations, vmin=0.0, vmax=1.0, cmap="viridis")
        ax.set_title(f"{label}  ($\\phi$ = {tomo.pulse_area_tag:.3f})", fontsize=9)
        ax.set_xticks(range(4), ticks, fontsize=7)
        ax.set_yticks(range(4), ticks, fontsize=7)
        ax.set_xlabel("output", fontsize=8)
        ax.set_ylabel("input", fontsize=8)
    for idx in range(n, rows * cols):
        axes[idx // cols][idx % cols].set_axis_off()
    fig.colorbar(im, ax=axes, shrink=0.75, label="population")
    fig.savefig(path, dpi=150, metadata=_PNG_META)
    plt.close(fig)
    return Path(path)


def plot_fidelity(path, series_list):
    """F and F^2 vs cumulative area for one or more envelope sweeps."""
    fig, ax = plt.subplots(figsize=(6.4, 3.8))
    for series in series_list:
        (line,) = ax.plot(series.areas, series.fidelity, lw=1.4, label=f"F ({series.envelope})")
        ax.plot(
            series.areas,
            series.fidelity_squared,
            lw=1.0,
            ls="--",
            color=line.get_color(),
            label=f"$F^2$ ({series.envelope})",
        )
    ax.set_xlabel("cumulative pulse area (rad)")
    ax.set_ylabel("Bell-state fidelity")
    ax.set_ylim(0.0, 1.02)
    ax.grid(alpha=0.3)
    ax.legend(frameon=False, fontsize=8)
    return _save(fig, Path(path))


def plot_trace(path, times, areas, populations):
    """Populations along one integration, against time and cumulative area."""
    fig, (ax_t, ax_a) = plt.subplots(2, 1, figsize=(6.4, 5.6))
    for k in range(4):
        ax_t.plot(times, populations[:, k], label=_POP_LABELS[k], lw=1.3)
        ax_a.plot(areas, populations[:, k], lw=1.3)
    ax_t.set_xlabel("time")
    ax_t.set_ylabel("population")
    ax_t.grid(alpha=0.3)
    ax_t.legend(frameon=False, ncol=4, fontsize=8)
    ax_a.set_xlabel("cumulative pulse area (rad)")
    ax_a.set_ylabel("population")
    ax_a.grid(alpha=0.3)
    return _save(fig, Path(path))
