"""Render convergence figures for run reports.

Uses the Agg backend so figures render headless, written to files next to
the delimited trace output.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

__all__ = ["save_convergence_figure"]


def save_convergence_figure(
    curves: Iterable[tuple[str, Sequence[int], Sequence[float]]],
    path: str | Path,
    title: str | None = None,
) -> None:
    """Plot objective-vs-iteration curves and write them to ``path``.

    ``curves`` is an iterable of (label, iterations, objectives). The y
    axis goes logarithmic when every value is positive.
    """
    curves = list(curves)
    fig, ax = plt.subplots(figsize=(7.5, 4.5))
    for label, ts, fs in curves:
        ax.plot(ts, fs, label=label, linewidth=1.6)
    if all(f > 0 for _, _, fs in curves for f in fs):
        ax.set_yscale("log")
    ax.set_xlabel("iteration")
    ax.set_ylabel("objective")
    if title:
        ax.set_title(title)
    ax.grid(alpha=0.3)
    if curves:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
