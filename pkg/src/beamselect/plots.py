"""Deterministic SVG charts summarizing sweep results.

Two chart families, one file per algorithm found in the records:

* avg_sr_<algorithm>.svg - heatmap of per-cell average SR over (N, gamma_max),
  drawn whenever the records span the gamma_max axis;
* max_sr_<algorithm>.svg - per-cell maximum SR against beta, one line per N,
  drawn whenever the records span several beta values.

Rendering is byte-deterministic: a fixed svg.hashsalt pins matplotlib's
generated element ids and the metadata date stamp is suppressed, so the same
CSV always produces identical files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import ParseError
from .instance_io import load_results

_HASHSALT = "beamselect"


def _save(fig, path: Path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _algorithms(records) -> list:
    seen = []
    for record in records:
        if record.algorithm not in seen:
            seen.append(record.algorithm)
    return seen


def _aggregate(records, key_fields, reduce_fn) -> dict:
    groups = {}
    for record in records:
        key = tuple(getattr(record, f) for f in key_fields)
        groups.setdefault(key, []).append(record.sr)
    return {key: reduce_fn(srs) for key, srs in groups.items()}


def render_charts(csv_path, out_dir) -> list:
    """Render every applicable chart for a sweep result file; returns paths."""
    records = load_results(csv_path)
    if not records:
        raise ParseError(f"{csv_path}: no records to plot")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    plt.rcParams["svg.hashsalt"] = _HASHSALT
    n_values = sorted({r.n for r in records})
    gamma_values = sorted({r.gamma_max for r in records})
    beta_values = sorted({r.beta for r in records})
    paths = []
    if len(beta_values) <= 1 or len(gamma_values) > 1:
        means = _aggregate(records, ("algorithm", "n", "gamma_max"),
                           lambda srs: sum(srs) / len(srs))
        for algorithm in _algorithms(records):
            grid = np.full((len(gamma_values), len(n_values)), np.nan)
            for gi, gamma_max in enumerate(gamma_values):
                for ni, n in enumerate(n_values):
                    key = (algorithm, n, gamma_max)
                    if key in means:
                        grid[gi, ni] = means[key]
            fig, ax = plt.subplots(figsize=(6.0, 4.5))
            image = ax.imshow(grid, origin="lower", aspect="auto", cmap="viridis")
            ax.set_xticks(range(len(n_values)), [str(n) for n in n_values])
            ax.set_yticks(range(len(gamma_values)), [f"{g:g}" for g in gamma_values])
            ax.set_xlabel("number of agents N")
            ax.set_ylabel("gamma_max")
            ax.set_title(f"average suboptimality ratio, {algorithm}")
            fig.colorbar(image, ax=ax, label="average SR")
            for gi in range(len(gamma_values)):
                for ni in range(len(n_values)):
                    if np.isfinite(grid[gi, ni]):
                        ax.text(ni, gi, f"{grid[gi, ni]:.3f}", ha="center",
                                va="center", color="white", fontsize=8)
            path = out_dir / f"avg_sr_{algorithm}.svg"
            _save(fig, path)
            paths.append(path)
    if len(beta_values) > 1:
        maxima = _aggregate(records, ("algorithm", "n", "beta"), max)
        for algorithm in _algorithms(records):
            fig, ax = plt.subplots(figsize=(6.0, 4.5))
            for n in n_values:
                ys = [maxima.get((algorithm, n, beta), np.nan)
                      for beta in beta_values]
                ax.plot(beta_values, ys, marker="o", label=f"N = {n}")
            ax.set_xlabel("threshold fraction beta")
            ax.set_ylabel("maximum SR")
            ax.set_title(f"maximum suboptimality ratio, {algorithm}")
            ax.grid(True, alpha=0.3)
            ax.legend(fontsize=8)
            path = out_dir / f"max_sr_{algorithm}.svg"
            _save(fig, path)
            paths.append(path)
    return paths
