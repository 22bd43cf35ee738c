"""Figure rendering for the CLI report path.

Each experiment kind gets one PNG rendered next to its CSV artifacts. The
CSVs are the canonical, byte-stable record; the figures are a quick visual
check and carry no determinism contract.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path) -> None:
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def save_solve_trace(path, labelled_series) -> None:
    """Scaled gradient norm per iteration, one line per seed."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, values in labelled_series:
        ax.semilogy(values, lw=1.0, label=label)
    ax.set_xlabel("iteration")
    ax.set_ylabel("scaled gradient norm")
    if len(labelled_series) <= 10:
        ax.legend(fontsize=8)
    _save(fig, path)


def save_stoptest_trace(path, scaled, t1, t2, trigger) -> None:
    """One seed's scaled gradient against the two stopping tolerances."""
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.semilogy(scaled, lw=1.0, label="scaled gradient")
    ax.semilogy(t1, lw=0.8, ls="--", label="T1")
    ax.semilogy(t2, lw=0.8, ls=":", label="T2")
    if trigger is not None:
        ax.axvline(trigger, color="k", lw=0.8, alpha=0.5, label=f"trigger @ {trigger}")
    ax.set_xlabel("iteration")
    ax.legend(fontsize=8)
    _save(fig, path)


def save_active_trace(path, series, mu) -> None:
    """Largest strongly-active coordinate per iteration at fixed mu."""
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.semilogy(series, lw=1.0)
    ax.axhline(mu, color="k", lw=0.8, ls="--", alpha=0.6)
    ax.set_xlabel("iteration")
    ax.set_ylabel("max active-set coordinate")
    ax.set_title(f"mu = {mu:g}")
    _save(fig, path)


def save_radii_curves(path, report) -> None:
    """Containment/attraction radius curves against the identity line."""
    fig, ax = plt.subplots(figsize=(6, 5))
    on = report.feasible_grid
    ax.plot(report.grid[on], report.delta_minus_grid[on], label="delta_minus")
    ax.plot(report.grid[on], report.delta_plus_grid[on], label="delta_plus")
    ax.plot(report.grid, report.grid, color="k", lw=0.8, ls="--", label="identity")
    for v, name in ((report.delta1_min, "delta1_min"), (report.delta2_max, "delta2_max")):
        if v is not None:
            ax.axvline(v, lw=0.6, alpha=0.5)
    ax.set_xlabel("bar_delta")
    ax.set_ylabel("radius")
    ax.set_ylim(0, min(1.0, float(np.nanmax(report.delta_plus_grid)) * 1.1))
    ax.legend(fontsize=8)
    _save(fig, path)


def save_scatter_panels(path, iterates, grad_noisy, grad_true) -> None:
    """Last-iterates cloud plus noisy and true gradient clouds."""
    fig, axes = plt.subplots(1, 3, figsize=(12, 4))
    for ax, (pts, title) in zip(
        axes,
        (
            (iterates, "iterates"),
            (grad_noisy, "noisy barrier gradients"),
            (grad_true, "true barrier gradients"),
        ),
    ):
        pts = np.asarray(pts)
        ax.scatter(pts[:, 0], pts[:, 1], s=6, alpha=0.6)
        ax.set_title(title, fontsize=9)
    _save(fig, path)
