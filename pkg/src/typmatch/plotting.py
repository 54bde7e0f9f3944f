"""Figures rendered from sweep CSV rows."""

from __future__ import annotations

import math
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# fixed metadata keeps repeated renders byte-stable
_PNG_META = {"Software": None}


def plot_sweep(rows: list[dict], path: str, *, title: str | None = None) -> None:
    """Mean correct fraction against I(X1;X2), one line per n, chance level dashed."""
    by_n = defaultdict(list)
    for row in rows:
        by_n[int(row["n"])].append(row)
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    for n, cell in sorted(by_n.items()):
        cell.sort(key=lambda r: float(r["mi_bits"]))
        mi = [float(r["mi_bits"]) for r in cell]
        mean = [float(r["mean_correct_fraction"]) for r in cell]
        k = [max(1.0, float(r["trials"]) * (1 - float(r["empty_sigma_rate"]))) for r in cell]
        err = [float(r["std_correct_fraction"]) / math.sqrt(kk) for r, kk in zip(cell, k)]
        line = ax.errorbar(mi, mean, yerr=err, marker="o", ms=4, capsize=2, label=f"n={n}")
        ax.axhline(1.0 / n, ls="--", lw=0.8, color=line[0].get_color())
    ax.set_xlabel("I(X1;X2) [bits]")
    ax.set_ylabel("mean correct fraction")
    ax.set_ylim(0, 1.05)
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)


def plot_empty_rate(rows: list[dict], path: str) -> None:
    by_n = defaultdict(list)
    for row in rows:
        by_n[int(row["n"])].append(row)
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    for n, cell in sorted(by_n.items()):
        cell.sort(key=lambda r: float(r["rho"]))
        ax.plot([float(r["rho"]) for r in cell], [float(r["empty_sigma_rate"]) for r in cell],
                marker="s", ms=4, label=f"n={n}")
    ax.set_xlabel("rho")
    ax.set_ylabel("empty candidate-set rate")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)
