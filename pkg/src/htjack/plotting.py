"""Matplotlib rendering of densities and sample overlays.

Figures are written to files (svg/png/pdf inferred from the extension) and
never shown interactively; the resolved run configuration is embedded in the
file metadata so every artifact is self-describing.
"""

from __future__ import annotations

import json

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .density import CrystalDensity, density_grid
from .rtransform import EnsembleSpec, Family
from .sampler import histogram
from .spectra import char_fn


def _save(fig, path: str, config: dict | None):
    meta = None
    if config is not None and str(path).endswith((".svg", ".png")):
        meta = {"Description": json.dumps(config, default=str)}
    fig.savefig(path, metadata=meta, bbox_inches="tight")
    plt.close(fig)


def render_density(
    density: CrystalDensity,
    path: str,
    spec: EnsembleSpec | None = None,
    config: dict | None = None,
    title: str | None = None,
):
    """Density steps, with the characteristic function overlaid in green."""
    fig, ax = plt.subplots(figsize=(9, 4))
    xs, fs = density_grid(density, points=4001)
    ax.fill_between(xs, fs, step="mid", color="#9ecae1", alpha=0.6)
    ax.plot(xs, fs, drawstyle="steps-mid", color="#3182bd", lw=1.2, label="limit density")
    ax.set_ylabel("density")
    ax.set_xlabel("shifted particle position")
    if spec is not None and spec.family in (Family.PLANCH, Family.ALPHA):
        zs = np.linspace(xs[0], xs[-1], 1200)
        # zeros of F(-x) sit at the interval right endpoints
        vals = np.array([char_fn(spec, -x) for x in zs])
        scale = np.percentile(np.abs(vals), 90) or 1.0
        ax2 = ax.twinx()
        ax2.plot(zs, vals / scale, color="#31a354", lw=1.0, alpha=0.9)
        ax2.axhline(0.0, color="#31a354", lw=0.5, ls=":")
        ax2.set_yticks([])
        ax2.set_ylim(-3, 3)
    if title:
        ax.set_title(title)
    ax.legend(loc="upper right")
    _save(fig, path, config)


def render_overlay(
    density: CrystalDensity,
    samples,
    path: str,
    bin_width: float = 0.05,
    spec: EnsembleSpec | None = None,
    config: dict | None = None,
    title: str | None = None,
):
    """Sample histogram (blue bars) against the predicted density (dark steps)."""
    fig, ax = plt.subplots(figsize=(9, 4))
    samples = np.asarray(samples, dtype=float)
    lefts, counts = histogram(samples, bin_width)
    heights = counts / (samples.size * bin_width)
    ax.bar(lefts, heights, width=bin_width, align="edge", color="#6baed6",
           alpha=0.75, label=f"samples (n={samples.size})")
    xs, fs = density_grid(density, points=4001)
    ax.plot(xs, fs, drawstyle="steps-mid", color="#08306b", lw=1.4, label="predicted density")
    if spec is not None and spec.family in (Family.PLANCH, Family.ALPHA):
        zs = np.linspace(xs[0], xs[-1], 1200)
        vals = np.array([char_fn(spec, -x) for x in zs])
        scale = np.percentile(np.abs(vals), 90) or 1.0
        ax2 = ax.twinx()
        ax2.plot(zs, vals / scale, color="#31a354", lw=1.0, alpha=0.8)
        ax2.axhline(0.0, color="#31a354", lw=0.5, ls=":")
        ax2.set_yticks([])
        ax2.set_ylim(-3, 3)
    ax.set_xlabel("shifted particle position")
    ax.set_ylabel("density")
    if title:
        ax.set_title(title)
    ax.legend(loc="upper right")
    _save(fig, path, config)
