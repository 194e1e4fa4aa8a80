"""Figure rendering for the hallucination audit, written as PNG files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .metrics import Histogram

_BAR_COLORS = ("#4878a8", "#d1605e")


def save_score_histogram(hists: dict[str, Histogram], path: str,
                         title: str = "Adjusted sentence BLEU") -> str:
    """Overlay one bar series per labeled histogram and save the figure."""
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    for (label, hist), color in zip(hists.items(), _BAR_COLORS):
        lefts = hist.edges[:-1]
        widths = [hi - lo for lo, hi in zip(hist.edges, hist.edges[1:])]
        ax.bar(lefts, hist.freqs, width=widths, align="edge", alpha=0.55,
               color=color, edgecolor="white", linewidth=0.5, label=label)
    ax.set_xlabel("adjusted BLEU")
    ax.set_ylabel("fraction of sentences")
    ax.set_title(title)
    ax.set_xlim(0, 100)
    if len(hists) > 1:
        ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_disjoint_counts(a_only: int, b_only: int, path: str,
                         labels: tuple[str, str] = ("system A", "system B"),
                         title: str = "Hallucinations unique to each system") -> str:
    """Two-bar summary of the disjoint hallucination counts."""
    fig, ax = plt.subplots(figsize=(4.5, 4.0))
    bars = ax.bar(labels, [a_only, b_only], color=_BAR_COLORS, width=0.6)
    ax.bar_label(bars)
    ax.set_ylabel("sentences")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
