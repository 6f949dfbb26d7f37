"""The analogical layer: window of presence, patches and their unification.

A :class:`Patch` is an elementary analogical fragment: a grid that exactly
fills the window of presence. Its cells carry partial attribute assignments
and, optionally, one symbol token each. Patches are unified cell-wise; two
determinate values clash only when they differ *and* sit in the same world
layer, so content tagged with different worlds is co-displayed side by side.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterator, Mapping

from .universe import AttributeSchema, Coord, Region

REFERENCE_LAYER = ""


class PresenceError(ValueError):
    pass


@dataclass(frozen=True)
class Anchor:
    world: str
    x: int = 0
    y: int = 0

    @property
    def offset(self) -> Coord:
        return (self.x, self.y)

    def __str__(self) -> str:
        return f"{self.world}@{self.x},{self.y}"


@dataclass(frozen=True)
class Cell:
    content: tuple[tuple[str, str], ...] = ()
    token: str | None = None

    @classmethod
    def of(cls, content: Mapping[str, str] | None = None, token: str | None = None) -> Cell:
        return cls(tuple(sorted((content or {}).items())), token)

    def get(self, attr: str) -> str | None:
        for name, value in self.content:
            if name == attr:
                return value
        return None

    def as_dict(self) -> dict[str, str]:
        return dict(self.content)

    @property
    def empty(self) -> bool:
        return not self.content and self.token is None


EMPTY = Cell()


@dataclass(frozen=True)
class SymbolToken:
    unit: str
    position: Coord


@dataclass(frozen=True)
class Patch:
    """A rectangular grid of cells, stored row-major (``rows[y][x]``).

    Patches of any size can be built; :func:`fits_window` decides whether one
    is an elementary analogical fragment for a given window. Odd-sized patches
    are used as recurrence templates.
    """

    rows: tuple[tuple[Cell, ...], ...]
    anchor: Anchor | None = None

    def __post_init__(self):
        widths = {len(row) for row in self.rows}
        if len(widths) > 1:
            raise PresenceError("ragged patch rows")

    @classmethod
    def blank(cls, width: int, height: int, anchor: Anchor | None = None) -> Patch:
        return cls(tuple(tuple(EMPTY for _ in range(width)) for _ in range(height)), anchor)

    @classmethod
    def from_cells(
        cls,
        width: int,
        height: int,
        content: Mapping[Coord, Mapping[str, str]] | None = None,
        tokens: Mapping[Coord, str] | None = None,
        anchor: Anchor | None = None,
    ) -> Patch:
        content = content or {}
        tokens = tokens or {}
        for coord in list(content) + list(tokens):
            x, y = coord
            if not (0 <= x < width and 0 <= y < height):
                raise PresenceError(f"cell {coord} outside {width}x{height} patch")
        rows = tuple(
            tuple(Cell.of(content.get((x, y)), tokens.get((x, y))) for x in range(width))
            for y in range(height)
        )
        return cls(rows, anchor)

    @property
    def width(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def height(self) -> int:
        return len(self.rows)

    def at(self, x: int, y: int) -> Cell:
        return self.rows[y][x]

    def cells(self) -> Iterator[tuple[Coord, Cell]]:
        for y, row in enumerate(self.rows):
            for x, cell in enumerate(row):
                yield (x, y), cell

    def content(self) -> dict[Coord, dict[str, str]]:
        return {coord: cell.as_dict() for coord, cell in self.cells() if cell.content}

    def with_anchor(self, anchor: Anchor | None) -> Patch:
        return Patch(self.rows, anchor)

    def footprint(self) -> Region:
        if self.anchor is None:
            return Region(0, 0, self.width, self.height)
        return Region(self.anchor.x, self.anchor.y, self.width, self.height)

    @property
    def layer(self) -> str:
        return self.anchor.world if self.anchor else REFERENCE_LAYER


@dataclass(frozen=True)
class WindowSpec:
    width: int
    height: int
    schema: AttributeSchema
    dimensions: int = 2

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise PresenceError(f"window must be at least 1x1, got {self.width}x{self.height}")
        if self.dimensions != 2:
            raise PresenceError("only 2-dimensional windows are supported")


@dataclass(frozen=True)
class Situation:
    id: str
    patch: Patch
    anchor: Anchor
    code: int | None = None


def respects_schema(patch: Patch, schema: AttributeSchema) -> bool:
    return all(
        schema.admits(attr, value)
        for _, cell in patch.cells()
        for attr, value in cell.content
    )


def fits_window(patch: Patch, spec: WindowSpec) -> bool:
    return (
        patch.width == spec.width
        and patch.height == spec.height
        and respects_schema(patch, spec.schema)
    )


def symbol_tokens(patch: Patch) -> list[SymbolToken]:
    return [
        SymbolToken(cell.token, coord)
        for coord, cell in patch.cells()
        if cell.token is not None
    ]


def read_situation(
    patch: Patch, anchor: Anchor, spec: WindowSpec, id: str = "", code: int | None = None
) -> Situation:
    if not fits_window(patch, spec):
        raise PresenceError(
            f"patch {patch.width}x{patch.height} does not fit window {spec.width}x{spec.height}"
        )
    return Situation(id, patch.with_anchor(anchor), anchor, code)


# -- displays ---------------------------------------------------------------

LayerCoord = tuple[str, int, int]


@dataclass(frozen=True)
class DisplayCell:
    content: tuple[tuple[str, str], ...] = ()
    tokens: frozenset[str] = frozenset()

    def as_dict(self) -> dict[str, str]:
        return dict(self.content)


@dataclass(frozen=True)
class Display:
    """A unified, possibly larger-than-window display.

    Cells are keyed by ``(layer, x, y)`` where the layer is a world tag;
    layers are separated by world frontiers and never interact.
    """

    cells: Mapping[LayerCoord, DisplayCell] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "cells", MappingProxyType(dict(self.cells)))

    def __eq__(self, other):
        if not isinstance(other, Display):
            return NotImplemented
        return dict(self.cells) == dict(other.cells)

    def __hash__(self):
        return hash(frozenset(self.cells.items()))

    @classmethod
    def from_patch(cls, patch: Patch, offset: Coord = (0, 0), layer: str | None = None) -> Display:
        tag = patch.layer if layer is None else layer
        dx, dy = offset
        cells = {}
        for (x, y), cell in patch.cells():
            tokens = frozenset([cell.token]) if cell.token else frozenset()
            cells[(tag, x + dx, y + dy)] = DisplayCell(cell.content, tokens)
        return cls(cells)

    def translate(self, dx: int, dy: int) -> Display:
        return Display({(t, x + dx, y + dy): c for (t, x, y), c in self.cells.items()})

    @property
    def layers(self) -> tuple[str, ...]:
        return tuple(sorted({t for t, _, _ in self.cells}))

    def layer(self, tag: str) -> dict[Coord, DisplayCell]:
        return {(x, y): c for (t, x, y), c in self.cells.items() if t == tag}

    def tokens(self) -> list[tuple[LayerCoord, str]]:
        """All tokens, ordered by layer then row-major position then unit."""
        found = [
            (key, unit) for key, cell in self.cells.items() for unit in cell.tokens
        ]
        return sorted(found, key=lambda item: (item[0][0], item[0][2], item[0][1], item[1]))

    def bounds(self, tag: str) -> Region | None:
        coords = [(x, y) for (t, x, y) in self.cells if t == tag]
        if not coords:
            return None
        xs = [x for x, _ in coords]
        ys = [y for _, y in coords]
        return Region(min(xs), min(ys), max(xs) - min(xs) + 1, max(ys) - min(ys) + 1)


@dataclass(frozen=True)
class ConflictCell:
    world: str
    x: int
    y: int
    attr: str
    left: str
    right: str

    def __str__(self) -> str:
        where = f"{self.world}:" if self.world else ""
        return f"{where}({self.x},{self.y}) {self.attr}: {self.left} vs {self.right}"


@dataclass(frozen=True)
class ConflictReport:
    cells: tuple[ConflictCell, ...]

    @property
    def worlds(self) -> tuple[str, ...]:
        return tuple(sorted({c.world for c in self.cells}))

    def cell_set(self) -> frozenset[tuple[str, int, int, str, frozenset[str]]]:
        """Clashing cells with the two values unordered (orientation-free)."""
        return frozenset(
            (c.world, c.x, c.y, c.attr, frozenset((c.left, c.right))) for c in self.cells
        )


def merge_cell(
    left: DisplayCell, right: DisplayCell
) -> tuple[DisplayCell, list[tuple[str, str, str]]]:
    """Merge two cells; returns the merged cell and any ``(attr, l, r)`` clashes."""
    merged = dict(left.content)
    clashes = []
    for attr, value in right.content:
        current = merged.get(attr)
        if current is None:
            merged[attr] = value
        elif current != value:
            clashes.append((attr, current, value))
    return DisplayCell(tuple(sorted(merged.items())), left.tokens | right.tokens), clashes


def unify_displays(left: Display, right: Display) -> Display | ConflictReport:
    cells = dict(left.cells)
    conflicts = []
    for key in sorted(right.cells, key=lambda k: (k[0], k[2], k[1])):
        incoming = right.cells[key]
        if key not in cells:
            cells[key] = incoming
            continue
        merged, clashes = merge_cell(cells[key], incoming)
        tag, x, y = key
        conflicts.extend(ConflictCell(tag, x, y, a, l, r) for a, l, r in clashes)
        cells[key] = merged
    if conflicts:
        return ConflictReport(tuple(conflicts))
    return Display(cells)


def unify_patches(
    left: Patch,
    right: Patch,
    alignment: Coord = (0, 0),
    schema: AttributeSchema | None = None,
) -> Display | ConflictReport:
    """Co-display ``right`` at ``alignment`` relative to ``left``.

    Coordinates of the result are in ``left``'s frame. Each patch lives in
    the layer of its anchor's world (unanchored patches share the reference
    layer). When ``schema`` is given both patches must respect it.
    """
    if schema is not None:
        for which, patch in (("left", left), ("right", right)):
            if not respects_schema(patch, schema):
                raise PresenceError(f"{which} patch does not match the schema")
    return unify_displays(Display.from_patch(left), Display.from_patch(right, alignment))


def template_offsets(
    cells: Mapping[Coord, Mapping[str, str]] | Patch,
    template: Patch,
    bounds: Region | None = None,
) -> Iterator[Coord]:
    """Row-major offsets where every determinate template cell matches.

    ``cells`` is a patch or a coordinate -> assignment map; a template value
    matches only an equal determinate value, never an indeterminate cell.
    """
    if isinstance(cells, Patch):
        bounds = bounds or Region(0, 0, cells.width, cells.height)
        cells = cells.content()
    if bounds is None:
        raise PresenceError("bounds required for a cell map")
    required = [(coord, cell.content) for coord, cell in template.cells() if cell.content]
    for oy in range(bounds.y, bounds.y + bounds.height - template.height + 1):
        for ox in range(bounds.x, bounds.x + bounds.width - template.width + 1):
            if all(
                cells.get((ox + tx, oy + ty), {}).get(attr) == value
                for (tx, ty), content in required
                for attr, value in content
            ):
                yield (ox, oy)


def find_template(
    cells: Mapping[Coord, Mapping[str, str]] | Patch,
    template: Patch,
    bounds: Region | None = None,
) -> Coord | None:
    return next(template_offsets(cells, template, bounds), None)
