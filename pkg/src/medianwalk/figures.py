"""Matplotlib rendering for walk and CLT reports.

Figures are written next to the delimited output; they are a convenience
view of the CSV/JSON results, never an input to anything.
"""

from __future__ import annotations

import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def _save(fig, out_dir, name):
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    fig.savefig(path, dpi=130, bbox_inches="tight")
    plt.close(fig)
    return path


def clt_histogram(samples, variance, out_dir, name="clt_histogram.png"):
    """Empirical CLT statistic against the target Gaussian density."""
    samples = np.asarray(samples, dtype=float)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(samples, bins=40, density=True, alpha=0.65, label="observed")
    if variance and variance > 0:
        xs = np.linspace(samples.min(), samples.max(), 300)
        pdf = np.exp(-xs * xs / (2 * variance)) / math.sqrt(2 * math.pi * variance)
        ax.plot(xs, pdf, lw=2, label=f"N(0, {variance:.3g})")
    ax.set_xlabel("(d(Z_n o, o) - n lambda) / sqrt(n)")
    ax.set_ylabel("density")
    ax.legend()
    return _save(fig, out_dir, name)


def drift_curves(distances, out_dir, max_curves=12, name="drift_curves.png"):
    """d(Z_k o, o)/k per trial plus the running mean."""
    distances = np.asarray(distances)
    n = distances.shape[1] - 1
    ks = np.arange(1, n + 1)
    fig, ax = plt.subplots(figsize=(6, 4))
    for row in distances[:max_curves]:
        ax.plot(ks, row[1:] / ks, lw=0.6, alpha=0.45, color="steelblue")
    ax.plot(ks, distances.mean(axis=0)[1:] / ks, lw=2, color="crimson", label="mean")
    ax.set_xlabel("step k")
    ax.set_ylabel("d(Z_k o, o) / k")
    ax.legend()
    return _save(fig, out_dir, name)


def s_growth_scatter(final_d, s_lower, n, out_dir, name="s_growth.png"):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter(final_d, s_lower, s=14, alpha=0.6)
    ax.set_xlabel(f"d(Z_n o, o), n = {n}")
    ax.set_ylabel("certified strongly separated chain")
    return _save(fig, out_dir, name)


def deviation_plot(table, out_dir, name="deviation_profile.png"):
    fig, ax = plt.subplots(figsize=(6, 4))
    steps = table["steps"]
    for eps, freqs in sorted(table["deviation"].items()):
        ax.plot(steps, freqs, marker="o", label=f"eps = {eps}")
    ax.set_xlabel("n")
    ax.set_ylabel("P(|d - n lambda| >= eps n)")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    return _save(fig, out_dir, name)


def render_clt_figures(report_doc, distances, samples, s_lower, out_dir):
    """Standard figure set for a CLT run; returns the file list."""
    paths = []
    variance = (report_doc.get("sigma2_direct") or {}).get("value")
    paths.append(clt_histogram(samples, variance, out_dir))
    paths.append(drift_curves(distances, out_dir))
    if s_lower is not None:
        n = report_doc.get("n") or distances.shape[1] - 1
        paths.append(s_growth_scatter(distances[:, -1], s_lower, n, out_dir))
    return paths
