"""PNG renderings of patches and displays, for reports run with ``--figures``."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Rectangle  # noqa: E402

from .presence import Display, Patch  # noqa: E402

_EMPTY = "#ffffff"


def _palette(keys) -> dict:
    cmap = plt.get_cmap("tab20")
    ordered = sorted(k for k in set(keys) if k)
    return {k: cmap(i % 20) for i, k in enumerate(ordered)}


def _draw(ax, cells: dict, tokens: dict, title: str) -> None:
    """``cells`` maps (x, y) to a sorted content tuple; ``tokens`` to a label."""
    palette = _palette(cells.values())
    xs = [x for x, _ in cells] or [0]
    ys = [y for _, y in cells] or [0]
    for (x, y), content in sorted(cells.items()):
        ax.add_patch(Rectangle((x, y), 1, 1, facecolor=palette.get(content, _EMPTY),
                               edgecolor="#999999", linewidth=0.5))
    for (x, y), label in sorted(tokens.items()):
        ax.text(x + 0.5, y + 0.5, label, ha="center", va="center", fontsize=7)
    ax.set_xlim(min(xs), max(xs) + 1)
    ax.set_ylim(max(ys) + 1, min(ys))
    ax.set_aspect("equal")
    ax.set_title(title, fontsize=9)
    ax.set_xticks([])
    ax.set_yticks([])
    handles = [Rectangle((0, 0), 1, 1, facecolor=c) for c in palette.values()]
    labels = [" ".join(f"{a}={v}" for a, v in k) for k in palette]
    if handles and len(handles) <= 12:
        ax.legend(handles, labels, fontsize=6, loc="upper left", bbox_to_anchor=(1.01, 1.0))


def _save(fig, path: str) -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    fig.savefig(path, dpi=100, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)
    return path


def render_patch(patch: Patch, path: str, title: str = "") -> str:
    cells = {coord: cell.content for coord, cell in patch.cells()}
    tokens = {coord: cell.token for coord, cell in patch.cells() if cell.token}
    fig, ax = plt.subplots(figsize=(4, 4))
    _draw(ax, cells, tokens, title or f"{patch.width}x{patch.height} patch")
    return _save(fig, path)


def render_display(display: Display, path: str, title: str = "") -> str:
    """One panel per world layer; frontiers separate the panels."""
    layers = list(display.layers) or [""]
    fig, axes = plt.subplots(1, len(layers), figsize=(4 * len(layers), 4), squeeze=False)
    for ax, tag in zip(axes[0], layers):
        cells = {c: dc.content for c, dc in display.layer(tag).items()}
        tokens = {c: ",".join(sorted(dc.tokens)) for c, dc in display.layer(tag).items() if dc.tokens}
        _draw(ax, cells, tokens, f"{title} [{tag or 'reference'}]".strip())
    return _save(fig, path)
