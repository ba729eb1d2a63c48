"""Figure rendering for CLI reports.

Every renderer takes already-computed report data and writes one PNG,
so no domain logic lives here.  The Agg backend keeps everything
headless-safe.
"""

from __future__ import annotations

import itertools
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .capture import DiagonalCaptureResult, MirrorCaptureResult  # noqa: E402
from .codes import Code  # noqa: E402
from .kthin import QExactResult  # noqa: E402

__all__ = [
    "save_distance_histogram",
    "save_qtable_chart",
    "save_mirror_capture_raster",
    "save_diagonal_capture_raster",
    "save_partition_weights",
]

_DPI = 120


def _finish(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def save_distance_histogram(code: Code, path) -> Path:
    """Histogram of all pairwise distances of a finite code."""
    dists = [
        (a.value ^ b.value).bit_count()
        for a, b in itertools.combinations(code.members, 2)
    ]
    n = code.word_length
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.hist(dists, bins=[d - 0.5 for d in range(n + 2)], color="#4878a8",
            edgecolor="black")
    ax.set_xlabel("pairwise distance")
    ax.set_ylabel("pairs")
    ax.set_title(f"distance profile, {len(code)} words of length {n}")
    ax.set_xticks(range(n + 1))
    return _finish(fig, Path(path))


def save_qtable_chart(rows: Sequence[QExactResult], path) -> Path:
    """Exact values (or interval tops) against the ball lower bound."""
    labels = [f"({r.n},{r.k})" for r in rows]
    balls = [r.lower_bound.ball for r in rows]
    values = [r.value if r.exact else r.upper for r in rows]
    xs = range(len(rows))
    fig, ax = plt.subplots(figsize=(max(6, len(rows) * 0.7), 3.5))
    ax.bar([x - 0.2 for x in xs], balls, width=0.4, label="ball bound",
           color="#9ecae1")
    ax.bar([x + 0.2 for x in xs], values, width=0.4, label="partition number",
           color="#31669e")
    for x, r in zip(xs, rows):
        if not r.exact:
            ax.text(x + 0.2, r.upper, "?", ha="center", va="bottom")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels)
    ax.set_xlabel("(n, k)")
    ax.set_ylabel("parts")
    ax.legend()
    return _finish(fig, Path(path))


def _bit_rows(words) -> list[list[int]]:
    return [[w[k] for k in range(w.n)] for w in words]


def save_mirror_capture_raster(result: MirrorCaptureResult, path) -> Path:
    """The two outcome prefixes as bit rows, divergence marked."""
    a = result.initial.outcome_prefix
    b = result.mirror.outcome_prefix
    fig, ax = plt.subplots(figsize=(max(6, a.n * 0.25), 2))
    ax.imshow(_bit_rows([a, b]), cmap="Greys", aspect="auto",
              interpolation="nearest")
    ax.axvline(result.divergence_index, color="red", lw=1.5)
    ax.set_yticks([0, 1])
    ax.set_yticklabels(["initial", "mirror"])
    ax.set_xlabel("bit index")
    ax.set_title(f"outcomes differ only at index {result.divergence_index}")
    return _finish(fig, Path(path))


def save_diagonal_capture_raster(result: DiagonalCaptureResult, path,
                                 length: int | None = None) -> Path:
    """Outcome prefixes of all returned plays, one row per play."""
    length = length or result.min_outcome_length()
    rows = _bit_rows([p.outcome_prefix[0:length] for p in result.plays])
    fig, ax = plt.subplots(figsize=(max(6, length * 0.25), 1 + 0.4 * len(rows)))
    ax.imshow(rows, cmap="Greys", aspect="auto", interpolation="nearest")
    ax.set_yticks(range(len(rows)))
    ax.set_yticklabels([f"play {i}" for i in range(len(rows))])
    ax.set_xlabel("bit index")
    ax.set_title("each play = play 0 with leading bits xored by its index")
    return _finish(fig, Path(path))


def save_partition_weights(parts: Sequence[Code], path) -> Path:
    """Stacked weight histogram of a partition's parts."""
    n = parts[0].word_length
    weights = [[w.weight for w in part] for part in parts]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.hist(weights, bins=[x - 0.5 for x in range(n + 2)], stacked=True,
            label=[f"part {i}" for i in range(len(parts))])
    ax.set_xlabel("word weight")
    ax.set_ylabel("words")
    ax.set_xticks(range(n + 1))
    if len(parts) <= 8:
        ax.legend()
    return _finish(fig, Path(path))
