"""Intensional semantic images: rules that compute a patch for a region request.

A rule is a finite description standing for content it does not store, the
way an equation stands for a figure. Rules are evaluated on demand; the
evaluation is purely a function of the requested cells' coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

from .presence import Anchor, Patch, PresenceError
from .universe import Region

RuleFn = Callable[[Mapping[str, str], int, int], dict[str, str]]
RULE_KINDS: dict[str, RuleFn] = {}


def rule_kind(name: str):
    def register(fn: RuleFn) -> RuleFn:
        RULE_KINDS[name] = fn
        return fn

    return register


def _float(params: Mapping[str, str], key: str, default: float) -> float:
    return float(params.get(key, default))


def circle_extremes(x0: float, x1: float, y0: float, y1: float) -> tuple[float, float]:
    """Min and max of ``x^2 + y^2`` over the closed box ``[x0,x1] x [y0,y1]``."""

    def nearest(lo, hi):
        return 0.0 if lo <= 0.0 <= hi else min(abs(lo), abs(hi))

    def farthest(lo, hi):
        return max(abs(lo), abs(hi))

    lo = nearest(x0, x1) ** 2 + nearest(y0, y1) ** 2
    hi = farthest(x0, x1) ** 2 + farthest(y0, y1) ** 2
    return lo, hi


@rule_kind("circle")
def circle(params: Mapping[str, str], x: int, y: int) -> dict[str, str]:
    """Rasterized unit circle ``x^2 + y^2 = 1``.

    Cell ``(x, y)`` spans ``[x, x+1] x [y, y+1]`` in grid units; the curve is
    centred at ``(cx, cy)`` with ``scale`` cells per unit length. A cell is
    *on* when the curve passes through its closed box.
    """
    cx = _float(params, "cx", 0.0)
    cy = _float(params, "cy", 0.0)
    scale = _float(params, "scale", 1.0)
    lo, hi = circle_extremes(
        (x - cx) / scale, (x + 1 - cx) / scale, (y - cy) / scale, (y + 1 - cy) / scale
    )
    attr = params.get("attr", "ink")
    on = lo <= 1.0 <= hi
    return {attr: params.get("on", "on") if on else params.get("off", "off")}


@rule_kind("fill")
def fill(params: Mapping[str, str], x: int, y: int) -> dict[str, str]:
    return {params["attr"]: params["value"]}


@dataclass(frozen=True)
class Rule:
    id: str
    kind: str
    params: Mapping[str, str] = field(default_factory=dict)
    anchor: Anchor | None = None

    def __post_init__(self):
        if self.kind not in RULE_KINDS:
            raise PresenceError(f"unknown rule kind {self.kind!r}")
        object.__setattr__(self, "params", dict(self.params))

    def __hash__(self):
        return hash((self.id, self.kind, tuple(sorted(self.params.items())), self.anchor))

    def evaluate(self, request: Region, world: str | None = None) -> Patch:
        """Patch covering ``request``; coordinates are relative to the anchor."""
        fn = RULE_KINDS[self.kind]
        ox, oy = self.anchor.offset if self.anchor else (0, 0)
        content = {
            (i, j): fn(self.params, request.x + i - ox, request.y + j - oy)
            for j in range(request.height)
            for i in range(request.width)
        }
        anchor = None
        if world is not None:
            anchor = Anchor(world, request.x, request.y)
        elif self.anchor is not None:
            anchor = Anchor(self.anchor.world, request.x, request.y)
        return Patch.from_cells(request.width, request.height, content, anchor=anchor)
