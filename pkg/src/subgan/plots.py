"""Figure rendering for run directories and sweep summaries.

All figures are written as self-contained SVG files next to the CSVs
they were drawn from (fonts rendered as paths, no display needed).
"""

from __future__ import annotations

import csv
import warnings
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.fonttype"] = "path"

import matplotlib.pyplot as plt
import numpy as np


def _read_csv(path: Path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    return header, (np.array(rows) if rows else np.empty((0, len(header))))


def training_curves(run_dir: Path, out_path: Path) -> bool:
    steps_path = run_dir / "steps.csv"
    metrics_path = run_dir / "metrics.csv"
    if not steps_path.exists() and not metrics_path.exists():
        return False
    n_axes = int(steps_path.exists()) + int(metrics_path.exists())
    fig, axes = plt.subplots(1, n_axes, figsize=(5 * n_axes, 3.5))
    axes = np.atleast_1d(axes)
    i = 0
    if steps_path.exists():
        header, data = _read_csv(steps_path)
        ax = axes[i]
        i += 1
        if data.size:
            col = {name: j for j, name in enumerate(header)}
            ax.plot(data[:, col["step"]], data[:, col["loss_d"]], label="discriminator")
            ax.plot(data[:, col["step"]], data[:, col["loss_g"]], label="generator")
            ax.legend(fontsize=8)
        ax.set_xlabel("step")
        ax.set_ylabel("loss")
        ax.set_title("training losses")
    if metrics_path.exists():
        header, data = _read_csv(metrics_path)
        ax = axes[i]
        if data.size:
            col = {name: j for j, name in enumerate(header)}
            ax.plot(data[:, col["step"]], data[:, col["frechet"]], marker="o")
        ax.set_xlabel("step")
        ax.set_ylabel("Gaussian Frechet distance")
        ax.set_title("sample quality")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return True


def scatter_points(real: np.ndarray, fake: np.ndarray, out_path,
                   title: str = "real vs. generated samples") -> None:
    real = np.asarray(real)
    fake = np.asarray(fake)
    if real.shape[1] < 2:
        real = np.column_stack([real, np.zeros(len(real))])
        fake = np.column_stack([fake, np.zeros(len(fake))])
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    ax.scatter(real[:, 0], real[:, 1], s=4, alpha=0.4, label="real")
    ax.scatter(fake[:, 0], fake[:, 1], s=4, alpha=0.4, label="generated")
    ax.legend(fontsize=8)
    ax.set_title(title)
    ax.set_aspect("equal", adjustable="datalim")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)


def scatter_overlay(run_dir: Path, out_path: Path) -> bool:
    real_path = run_dir / "samples_real.csv"
    fake_path = run_dir / "samples_generated.csv"
    if not (real_path.exists() and fake_path.exists()):
        return False
    _, real = _read_csv(real_path)
    _, fake = _read_csv(fake_path)
    scatter_points(real, fake, out_path)
    return True


def divergence_plot(run_dir: Path, out_path: Path) -> bool:
    path = run_dir / "divergence.csv"
    if not path.exists():
        return False
    header, data = _read_csv(path)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    if data.size:
        col = {name: j for j, name in enumerate(header)}
        ax.semilogy(data[:, col["step"]], np.maximum(data[:, col["theta_divergence"]], 1e-18),
                    label="generator")
        ax.semilogy(data[:, col["step"]], np.maximum(data[:, col["psi_divergence"]], 1e-18),
                    label="discriminator")
        ax.legend(fontsize=8)
    ax.set_xlabel("step")
    ax.set_ylabel("max relative parameter divergence")
    ax.set_title("standard vs. decomposed trajectories")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return True


def emit_plots(run_dir) -> dict[str, list[str]]:
    """Render every figure this directory's CSVs support.

    Returns {"written": [...], "missing": [...]}; an empty directory is a
    warned no-op.
    """
    run_dir = Path(run_dir)
    written: list[str] = []
    missing: list[str] = []
    jobs = [
        ("training_metrics.svg", training_curves, ["steps.csv", "metrics.csv"]),
        ("samples_scatter.svg", scatter_overlay, ["samples_real.csv", "samples_generated.csv"]),
        ("divergence.svg", divergence_plot, ["divergence.csv"]),
    ]
    for out_name, renderer, inputs in jobs:
        if renderer(run_dir, run_dir / out_name):
            written.append(out_name)
        else:
            missing.extend(name for name in inputs if not (run_dir / name).exists())
    if not written:
        warnings.warn(f"no plottable CSVs found in {run_dir}", stacklevel=2)
    return {"written": written, "missing": missing}


def sweep_summary_plot(summary_csv, out_path) -> bool:
    """Mean Frechet distance with standard-error bars per sweep condition,
    with the standard-regime baseline as a dashed reference line."""
    summary_csv = Path(summary_csv)
    if not summary_csv.exists():
        return False
    with open(summary_csv, newline="") as fh:
        rows = list(csv.DictReader(fh))
    baseline = [r for r in rows if r["regime"] == "standard"]
    swept = [r for r in rows if r["regime"] != "standard"]
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    if swept:
        lam1 = np.array([float(r["lambda1"]) for r in swept])
        mean = np.array([float(r["mean_frechet"]) for r in swept])
        err = np.array([float(r["stderr_frechet"]) for r in swept])
        order = np.argsort(lam1)
        ax.errorbar(lam1[order], mean[order], yerr=err[order], marker="o",
                    capsize=3, label="decomposed")
    if baseline:
        ref = float(baseline[0]["mean_frechet"])
        ax.axhline(ref, linestyle="--", color="gray", label="standard baseline")
    ax.set_xlabel("inversion learning rate")
    ax.set_ylabel("Gaussian Frechet distance")
    ax.set_title("sweep summary (mean with standard error)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return True


def kernel_heatmap(matrix: np.ndarray, out_path) -> None:
    fig, ax = plt.subplots(figsize=(4.2, 3.8))
    im = ax.imshow(matrix, cmap="viridis")
    fig.colorbar(im, ax=ax, shrink=0.85)
    ax.set_title("parameter-Jacobian outer product")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
