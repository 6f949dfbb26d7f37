"""Ground-truth universes: finite 2-D grids of quantized attribute values.

A universe is the thing a representational system is *about*. It is never
consulted by the engine while explicitating or navigating; it only serves as
the oracle for completeness and faithfulness checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

Coord = tuple[int, int]
Assignment = Mapping[str, str]


class UniverseError(ValueError):
    """Raised for malformed schemas, worlds or region requests."""


@dataclass(frozen=True)
class Region:
    """Axis-aligned rectangle ``x, y, width, height`` in grid cells."""

    x: int
    y: int
    width: int
    height: int

    def __post_init__(self):
        if self.width < 0 or self.height < 0:
            raise UniverseError(f"negative region size {self.width}x{self.height}")

    def cells(self) -> Iterator[Coord]:
        for j in range(self.y, self.y + self.height):
            for i in range(self.x, self.x + self.width):
                yield (i, j)

    def contains(self, coord: Coord) -> bool:
        x, y = coord
        return self.x <= x < self.x + self.width and self.y <= y < self.y + self.height

    def within(self, width: int, height: int) -> bool:
        return (
            self.x >= 0
            and self.y >= 0
            and self.x + self.width <= width
            and self.y + self.height <= height
        )

    def __str__(self) -> str:
        return f"{self.x},{self.y},{self.width},{self.height}"


@dataclass(frozen=True)
class AttributeSchema:
    attributes: tuple[tuple[str, tuple[str, ...]], ...]
    resolution: int

    def __post_init__(self):
        names = [name for name, _ in self.attributes]
        if len(set(names)) != len(names):
            raise UniverseError(f"duplicate attribute names in {names}")
        if self.resolution < 1:
            raise UniverseError("resolution must be >= 1")
        for name, domain in self.attributes:
            if not 1 <= len(domain) <= self.resolution:
                raise UniverseError(
                    f"domain of {name!r} has {len(domain)} levels; "
                    f"allowed 1..{self.resolution}"
                )
            if len(set(domain)) != len(domain):
                raise UniverseError(f"duplicate values in domain of {name!r}")

    @classmethod
    def of(cls, attributes: Mapping[str, Iterable[str]], resolution: int | None = None):
        attrs = tuple((name, tuple(values)) for name, values in attributes.items())
        if resolution is None:
            resolution = max((len(d) for _, d in attrs), default=1)
        return cls(attrs, resolution)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.attributes)

    def domain(self, name: str) -> tuple[str, ...]:
        for attr, domain in self.attributes:
            if attr == name:
                return domain
        raise UniverseError(f"unknown attribute {name!r}")

    def admits(self, name: str, value: str) -> bool:
        for attr, domain in self.attributes:
            if attr == name:
                return value in domain
        return False


@dataclass(frozen=True)
class World:
    """One world of a universe.

    ``cells`` maps a coordinate to a partial assignment; an attribute missing
    from a cell's assignment is *indeterminate*, which is different from any
    domain value. ``facts`` lists proposition symbols true in the world, so a
    world doubles as a valuation for purely propositional content.
    """

    id: str
    width: int
    height: int
    cells: Mapping[Coord, Assignment] = field(default_factory=dict)
    facts: frozenset[str] = frozenset()

    def __post_init__(self):
        frozen = {
            coord: MappingProxyType(dict(assignment))
            for coord, assignment in self.cells.items()
            if assignment
        }
        object.__setattr__(self, "cells", MappingProxyType(frozen))
        object.__setattr__(self, "facts", frozenset(self.facts))

    @property
    def extent(self) -> Region:
        return Region(0, 0, self.width, self.height)

    def value(self, coord: Coord, attr: str) -> str | None:
        assignment = self.cells.get(coord)
        if assignment is None:
            return None
        return assignment.get(attr)

    def assignment(self, coord: Coord) -> Assignment:
        return self.cells.get(coord, MappingProxyType({}))


@dataclass(frozen=True)
class GroundFragment:
    world: str
    region: Region
    values: Mapping[Coord, Assignment]

    def local(self) -> dict[Coord, dict[str, str]]:
        """Values re-expressed in region-local coordinates."""
        return {
            (x - self.region.x, y - self.region.y): dict(a)
            for (x, y), a in self.values.items()
        }


@dataclass(frozen=True)
class Universe:
    schema: AttributeSchema
    worlds: Mapping[str, World]
    reference: str | None

    def __post_init__(self):
        object.__setattr__(self, "worlds", MappingProxyType(dict(self.worlds)))
        if self.reference is None:
            if self.worlds:
                raise UniverseError("missing reference")
        elif self.reference not in self.worlds:
            raise UniverseError(f"reference {self.reference!r} is not a world")

    @classmethod
    def empty(cls, schema: AttributeSchema) -> Universe:
        """The vacuous universe with no worlds (and so no reference)."""
        return cls(schema, {}, None)

    def world(self, world_id: str) -> World:
        try:
            return self.worlds[world_id]
        except KeyError:
            raise UniverseError(f"unknown world {world_id!r}") from None


def _validate_world(schema: AttributeSchema, world: World) -> None:
    if world.width < 0 or world.height < 0:
        raise UniverseError(f"world {world.id!r} has negative extent")
    for coord, assignment in world.cells.items():
        if not world.extent.contains(coord):
            raise UniverseError(
                f"coordinate {coord} outside extent {world.width}x{world.height} "
                f"of world {world.id!r}"
            )
        for attr, value in assignment.items():
            if not schema.admits(attr, value):
                raise UniverseError(
                    f"value {attr}={value} at {coord} of world {world.id!r} "
                    "outside its domain"
                )


def build_universe(
    schema: AttributeSchema,
    world_specs: Iterable[World | Mapping],
    reference: str | None = None,
) -> Universe:
    """Validate world descriptions against ``schema`` and assemble a universe.

    A world description is a :class:`World` or a mapping with keys ``id``,
    ``width``, ``height`` and optionally ``cells`` and ``facts``. The
    reference world defaults to the first one given.
    """
    worlds: dict[str, World] = {}
    for spec in world_specs:
        world = spec if isinstance(spec, World) else World(**spec)
        if world.id in worlds:
            raise UniverseError(f"duplicate world id {world.id!r}")
        _validate_world(schema, world)
        worlds[world.id] = world
    if reference is None:
        if not worlds:
            raise UniverseError("missing reference")
        reference = next(iter(worlds))
    return Universe(schema, worlds, reference)


def ground_fragment(universe: Universe, world: str, region: Region) -> GroundFragment:
    w = universe.world(world)
    if not region.within(w.width, w.height):
        raise UniverseError(
            f"region {region} out of bounds for world {world!r} "
            f"({w.width}x{w.height})"
        )
    values = {
        coord: w.cells[coord] for coord in region.cells() if coord in w.cells
    }
    return GroundFragment(world, region, MappingProxyType(values))


def window_regions(world: World, width: int, height: int, stride: tuple[int, int] | None = None):
    """Regions of size ``width x height`` tiled over ``world``.

    With the default stride (the window size) this is the window-aligned
    tiling; partial tiles at the far edges are dropped.
    """
    sx, sy = stride or (width, height)
    if sx < 1 or sy < 1:
        raise UniverseError("stride must be positive")
    for y in range(0, world.height - height + 1, sy):
        for x in range(0, world.width - width + 1, sx):
            yield Region(x, y, width, height)
