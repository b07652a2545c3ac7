"""Report figures for batch statistics.

Renders the game-length frequency distribution (log-scale counts per
trick length, with the fitted exponential tail overlaid) to an image
file next to the delimited exports.  Import is kept out of the hot paths
so simulation-only runs never pay for matplotlib.
"""

from __future__ import annotations

import math
from typing import Mapping, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .stochastic import LengthSummary, TailFit


def length_distribution_figure(
    summaries: Mapping[str, LengthSummary],
    fits: Optional[Mapping[str, TailFit]] = None,
    out_path: str = "lengths.png",
    bin_width: int = 5,
) -> str:
    """Plot trick-length frequency for one or more batches.

    ``summaries`` maps a legend label to a batch summary; ``fits`` may
    supply a fitted tail per label, drawn as a line over the points.
    Returns the path written.
    """
    fig, ax = plt.subplots(figsize=(8.0, 5.0))
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for i, (label, summary) in enumerate(summaries.items()):
        color = colors[i % len(colors)]
        binned: dict[int, int] = {}
        for length, count in summary.trick_histogram.items():
            binned[length // bin_width] = binned.get(length // bin_width, 0) + count
        xs = sorted(binned)
        ax.plot([b * bin_width + bin_width / 2 for b in xs],
                [binned[b] / bin_width for b in xs],
                ".", markersize=4, color=color, label=f"{label} ({summary.games:,} games)")
        fit = (fits or {}).get(label)
        if fit is not None:
            start = min(k for k in summary.trick_histogram) if summary.trick_histogram else 0
            xmax = max(summary.trick_histogram, default=0)
            tail_mass = summary.survival(start)
            if xmax > start and tail_mass:
                xs_line = range(start, xmax + 1, max(1, bin_width))
                scale = _tail_scale(summary, fit)
                ax.plot(list(xs_line),
                        [scale * math.exp(-fit.rate * x) for x in xs_line],
                        "-", linewidth=1, color=color, alpha=0.7,
                        label=f"{label} fit: half-life {fit.half_life:.1f} tricks")
    ax.set_yscale("log")
    ax.set_xlabel("game length (tricks)")
    ax.set_ylabel("frequency (games per trick)")
    ax.legend(frameon=False, fontsize=8)
    ax.set_title("Game length distribution")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def _tail_scale(summary: LengthSummary, fit: TailFit) -> float:
    """Scale factor anchoring the fitted exponential to the histogram."""
    # Match the fitted density to the observed count at the tail start.
    anchor = None
    for length in sorted(summary.trick_histogram):
        if summary.trick_histogram[length] > 0:
            anchor = length
        if anchor is not None and length > anchor + 20:
            break
    if anchor is None:
        return 1.0
    peak_length = max(summary.trick_histogram, key=summary.trick_histogram.get)
    count = summary.trick_histogram[peak_length]
    return count * math.exp(fit.rate * peak_length)
