"""Connectives as mechanisms of analogical extension, and presence of content.

A *world* here is either the id of a world in the system's bound universe,
or a valuation mapping proposition symbols to truth values. Content is
*present* in a world when:

- an :class:`Atom` is true there (a world's ``facts`` act as its valuation);
- a :class:`Proposition` about a grounded subject finds its predicate's
  template in the ground under one of the subject's anchored images, or,
  failing a grounded reading, is listed as a fact;
- an :class:`ObjectRef` has an image anchored in the world, or is a fact;
- an anchored :class:`Patch` unifies with the world's ground without clash.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from ..presence import Display, Patch, REFERENCE_LAYER, find_template, unify_displays
from ..universe import Region, World
from ..web import (
    Atom,
    ExtensionalImage,
    ObjectRef,
    Proposition,
    RepresentationalSystem,
    resolve_term,
)
from .formula import FormulaError

WorldRef = Union[str, Mapping[str, bool]]


class ContentError(ValueError):
    pass


@dataclass(frozen=True)
class Conjunction:
    members: tuple

    def substitute(self, old, new):
        return Conjunction(tuple(m.substitute(old, new) for m in self.members))

    def terms(self):
        return set().union(*(m.terms() for m in self.members)) if self.members else set()

    def __str__(self):
        return " & ".join(f"({m})" for m in self.members)

    def exceeds_window(self, width: int, height: int) -> bool:
        """True when the members cannot appear together in one window."""
        boxes = [m.footprint() for m in self.members if isinstance(m, Patch)]
        layers = {m.layer for m in self.members if isinstance(m, Patch)}
        if not boxes:
            return False
        if len(layers) > 1:
            return True
        x0 = min(b.x for b in boxes)
        y0 = min(b.y for b in boxes)
        x1 = max(b.x + b.width for b in boxes)
        y1 = max(b.y + b.height for b in boxes)
        return x1 - x0 > width or y1 - y0 > height

    def co_display(self):
        """Virtual co-display of patch members at their anchors."""
        display = Display()
        for m in self.members:
            if isinstance(m, Patch):
                offset = m.anchor.offset if m.anchor else (0, 0)
                display = unify_displays(display, Display.from_patch(m, offset))
                if not isinstance(display, Display):
                    return display
        return display


@dataclass(frozen=True)
class Disjunction:
    """Alternatives, each in its own fresh possible world."""

    alternatives: tuple[tuple[str, object], ...]

    def substitute(self, old, new):
        return Disjunction(tuple((t, c.substitute(old, new)) for t, c in self.alternatives))

    def terms(self):
        return set().union(*(c.terms() for _, c in self.alternatives))

    def __str__(self):
        return " | ".join(f"({c})" for _, c in self.alternatives)

    def co_display(self) -> Display:
        """All patch alternatives side by side, split by world frontiers."""
        cells = {}
        for tag, content in self.alternatives:
            if isinstance(content, Patch):
                base = content.layer or REFERENCE_LAYER
                offset = content.anchor.offset if content.anchor else (0, 0)
                part = Display.from_patch(content, offset, layer=f"{base}/{tag}")
                cells.update(part.cells)
        return Display(cells)


@dataclass(frozen=True)
class Negation:
    content: object

    def substitute(self, old, new):
        return Negation(self.content.substitute(old, new))

    def terms(self):
        return self.content.terms()

    def __str__(self):
        return f"not ({self.content})"


def conjoin(a, b) -> Conjunction:
    return Conjunction((a, b))


def disjoin(alternatives: Sequence) -> Disjunction:
    alternatives = list(alternatives)
    if not alternatives:
        raise ContentError("a disjunction needs at least one alternative")
    return Disjunction(tuple((f"alt{i}", c) for i, c in enumerate(alternatives)))


def negate(content) -> Negation:
    return Negation(content)


# -- presence --------------------------------------------------------------------


def _world(system: RepresentationalSystem | None, world: str) -> World:
    if system is None or system.bound_universe is None:
        raise ContentError(f"world {world!r} needs a system bound to a universe")
    if world not in system.bound_universe.worlds:
        raise ContentError(f"unknown world {world!r}")
    return system.bound_universe.worlds[world]


def _anchored_footprints(system: RepresentationalSystem, unit: str, world: str) -> list[Region]:
    boxes = []
    w, h = system.window.width, system.window.height
    for image in system.images(unit):
        if isinstance(image, ExtensionalImage):
            anchor = system.memory.retrieve(image.code).anchor
        else:
            anchor = image.rule.anchor
        if anchor is not None and anchor.world == world:
            boxes.append(Region(anchor.x, anchor.y, w, h))
    record = system.objects.get(unit)
    if record is not None:
        for sid in sorted(record.situations):
            a = system.situations[sid].anchor
            if a.world == world:
                boxes.append(Region(a.x, a.y, w, h))
    return boxes


def _ground_cells(world: World, box: Region) -> dict:
    return {c: dict(world.cells[c]) for c in box.cells() if c in world.cells}


def _patch_present(world: World, patch: Patch) -> bool:
    if patch.anchor is not None:
        if patch.anchor.world != world.id:
            return False
        offsets = [patch.anchor.offset]
    else:
        offsets = [
            (x, y)
            for y in range(world.height - patch.height + 1)
            for x in range(world.width - patch.width + 1)
        ]
    for ox, oy in offsets:
        if all(
            world.value((ox + x, oy + y), attr) in (None, value)
            for (x, y), cell in patch.cells()
            for attr, value in cell.content
        ):
            return True
    return False


def present(system: RepresentationalSystem | None, content, world: WorldRef) -> bool:
    if isinstance(content, Conjunction):
        return all(present(system, m, world) for m in content.members)
    if isinstance(content, Disjunction):
        return any(present(system, c, world) for _, c in content.alternatives)
    if isinstance(content, Negation):
        return not present(system, content.content, world)

    if not isinstance(world, str):
        valuation = world
        key = _valuation_key(system, content)
        if key not in valuation:
            raise FormulaError(f"valuation misses variable {key!r}")
        value = bool(valuation[key])
        if isinstance(content, Proposition) and not content.polarity:
            return not value
        return value

    w = _world(system, world)
    if isinstance(content, Atom):
        return content.name in w.facts
    if isinstance(content, Proposition):
        subject = resolve_term(system, content.subject)
        positive = Proposition(subject, content.predicate)
        unit = system.units.get(content.predicate)
        boxes = (
            _anchored_footprints(system, subject, world)
            if isinstance(subject, str) and subject in system.units else []
        )
        if unit is not None and unit.template is not None and boxes:
            found = any(
                find_template(_ground_cells(w, box), unit.template, box) is not None
                for box in boxes
            )
        else:
            found = str(positive) in w.facts
        return found == content.polarity
    if isinstance(content, ObjectRef):
        term = resolve_term(system, content.term)
        if isinstance(term, str) and term in system.units and _anchored_footprints(system, term, world):
            return True
        return str(term) in w.facts
    if isinstance(content, Patch):
        return _patch_present(w, content)
    raise ContentError(f"cannot evaluate {type(content).__name__} content")


def _valuation_key(system, content) -> str:
    if isinstance(content, Atom):
        return content.name
    if isinstance(content, Proposition):
        return str(Proposition(resolve_term(system, content.subject), content.predicate))
    if isinstance(content, ObjectRef):
        return str(resolve_term(system, content.term))
    raise ContentError(f"{type(content).__name__} content has no propositional reading")


holds = present

__all__ = [
    "Conjunction", "ContentError", "Disjunction", "Negation", "conjoin", "disjoin",
    "holds", "negate", "present",
]
