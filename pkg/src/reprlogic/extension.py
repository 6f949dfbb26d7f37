"""Analogical extension: projection, focusing, explicitation, paths and unions.

Explicitation replaces every token of a fragment by the projections of its
unit until nothing symbolic is left. Placement follows one rule: an image
anchored in world ``W`` is displayed at its anchor in the ``W`` layer; an
unanchored image is displayed with its origin at the token's cell, in the
token's layer. Anchored content is therefore laid out exactly as the world
it claims to show, and only genuinely wrong data can clash with it.

Images of one unit without an alternative tag are all co-present and must
unify. Images tagged ``alt`` are alternatives; each distinct tag opens a
separate branch (a different possible world) that also receives the
untagged images.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .presence import (
    REFERENCE_LAYER,
    ConflictCell,
    Display,
    DisplayCell,
    Patch,
    Situation,
    SymbolToken,
    symbol_tokens,
)
from .universe import Region
from .web import (
    ExtensionalImage,
    Image,
    IntensionalImage,
    Link,
    RepresentationalSystem,
)

DEFAULT_BUDGET = 100


class ExtensionError(ValueError):
    pass


def default_budget() -> int:
    value = os.environ.get("PRESENCE_BUDGET")
    if value is None:
        return DEFAULT_BUDGET
    try:
        budget = int(value)
    except ValueError:
        raise ExtensionError(f"PRESENCE_BUDGET must be an integer, got {value!r}") from None
    if budget < 1:
        raise ExtensionError("PRESENCE_BUDGET must be >= 1")
    return budget


# -- projection ----------------------------------------------------------------


def _image_patch(system: RepresentationalSystem, image: Image, request: Region | None) -> Patch:
    if isinstance(image, ExtensionalImage):
        return system.memory.retrieve(image.code)
    if request is None:
        raise ExtensionError(f"region required to evaluate rule {image.rule.id}")
    if (request.width, request.height) != (system.window.width, system.window.height):
        raise ExtensionError(
            f"region {request.width}x{request.height} does not match window "
            f"{system.window.width}x{system.window.height}"
        )
    return image.rule.evaluate(request)


def project(
    system: RepresentationalSystem,
    target: str | Sequence[str],
    request: Region | None = None,
) -> list[Patch]:
    """Display every image of ``target`` (a unit id or a sequence of them)."""
    units = [target] if isinstance(target, str) else list(target)
    patches = []
    for unit in units:
        images = system.images(unit)
        if not images:
            raise ExtensionError(f"no content: unit {unit!r} has no semantic image")
        patches.extend(_image_patch(system, image, request) for image in images)
    return patches


def focus(
    system: RepresentationalSystem,
    displayed: Patch,
    token: SymbolToken,
    request: Region | None = None,
) -> Patch:
    if token not in symbol_tokens(displayed):
        raise ExtensionError(f"token {token.unit} at {token.position} is not in the patch")
    images = system.images(token.unit)
    if not images:
        raise ExtensionError(f"no content: unit {token.unit!r} has no semantic image")
    first = images[0]
    if isinstance(first, IntensionalImage) and request is None:
        x, y = token.position
        request = Region(x, y, system.window.width, system.window.height)
    return _image_patch(system, first, request)


# -- explicitation ------------------------------------------------------------------


@dataclass(frozen=True)
class Source:
    """Where a displayed value came from."""

    id: str
    kind: str  # "extensional", "intensional", or "input"

    @property
    def is_rule(self) -> bool:
        return self.kind == "intensional"


@dataclass(frozen=True)
class WUnfold:
    """A wholly displayed unfold for one combination of alternatives."""

    alternatives: tuple[tuple[str, str], ...]
    display: Display

    @property
    def branches(self) -> dict[str, Display]:
        """World-tagged layers of the display, separated by frontiers."""
        out = {}
        for tag in self.display.layers:
            out[tag] = Display({k: c for k, c in self.display.cells.items() if k[0] == tag})
        return out

    @property
    def token_count(self) -> int:
        return sum(len(c.tokens) for c in self.display.cells.values())


@dataclass(frozen=True)
class IncoherenceReport:
    kind: str  # "intrinsic" or "extrinsic"
    reason: str  # "cycle", "budget", "no-content" or "conflict"
    cycle: tuple[str, ...] = ()
    cells: tuple[ConflictCell, ...] = ()
    cause: tuple[str, ...] = ()
    alternatives: tuple[tuple[str, str], ...] = ()

    @property
    def witness(self):
        return self.cells if self.reason == "conflict" else self.cycle


@dataclass
class _Pending:
    unit: str
    layer: str
    x: int
    y: int
    ancestry: tuple[str, ...]

    def key(self):
        return (self.layer, self.y, self.x, self.unit, self.ancestry)


@dataclass
class _Branch:
    values: dict = field(default_factory=dict)  # (layer,x,y) -> {attr: (value, Source)}
    pending: list = field(default_factory=list)
    alternatives: tuple = ()

    def clone(self) -> _Branch:
        return _Branch(
            {k: dict(v) for k, v in self.values.items()},
            list(self.pending),
            self.alternatives,
        )

    def place(self, patch: Patch, layer: str, ox: int, oy: int, source: Source,
              ancestry: tuple[str, ...]) -> list[tuple[ConflictCell, Source, Source]]:
        clashes = []
        for (x, y), cell in patch.cells():
            key = (layer, x + ox, y + oy)
            slot = self.values.setdefault(key, {})
            for attr, value in cell.content:
                current = slot.get(attr)
                if current is None:
                    slot[attr] = (value, source)
                elif current[0] != value:
                    clashes.append(
                        (ConflictCell(layer, key[1], key[2], attr, current[0], value),
                         current[1], source)
                    )
            if cell.token is not None:
                self.pending.append(_Pending(cell.token, layer, key[1], key[2], ancestry))
        return clashes

    def display(self) -> Display:
        return Display({
            key: DisplayCell(tuple(sorted((a, v) for a, (v, _) in slot.items())))
            for key, slot in self.values.items()
        })


def _image_source(image: Image) -> Source:
    if isinstance(image, ExtensionalImage):
        return Source(f"code:{image.code}", "extensional")
    return Source(f"rule:{image.rule.id}", "intensional")


def _placement(system: RepresentationalSystem, image: Image, token: _Pending):
    """Patch plus ``(layer, x, y)`` origin for one image of a token's unit."""
    window = system.window
    if isinstance(image, ExtensionalImage):
        patch = system.memory.retrieve(image.code)
        if patch.anchor is not None:
            return patch, patch.anchor.world, patch.anchor.x, patch.anchor.y
        return patch, token.layer, token.x, token.y
    rule = image.rule
    if rule.anchor is not None:
        a = rule.anchor
        patch = rule.evaluate(Region(a.x, a.y, window.width, window.height))
        return patch, a.world, a.x, a.y
    patch = rule.evaluate(Region(token.x, token.y, window.width, window.height))
    return patch, token.layer, token.x, token.y


def _classify(clashes) -> tuple[str, tuple[str, ...]]:
    sources = []
    for _, left, right in clashes:
        for s in (left, right):
            if s not in sources:
                sources.append(s)
    kind = "intrinsic" if all(s.is_rule for s in sources) else "extrinsic"
    return kind, tuple(sorted(s.id for s in sources))


def _resolve_fragment(system: RepresentationalSystem, fragment):
    """Initial branch contents for a patch, situation or unit fragment."""
    branch = _Branch()
    if isinstance(fragment, Situation):
        fragment = fragment.id
    if isinstance(fragment, str):
        if fragment in system.situations:
            sit = system.situations[fragment]
            source = (
                Source(f"code:{sit.code}", "extensional")
                if sit.code is not None
                else Source(f"situation:{sit.id}", "input")
            )
            branch.place(sit.patch, sit.anchor.world, sit.anchor.x, sit.anchor.y, source, ())
            return branch
        labelled = next((c for c, name in system.labels.items() if name == fragment), None)
        if labelled is not None and labelled in system.memory:
            fragment = system.memory.retrieve(labelled)
        elif fragment in system.units:
            branch.pending.append(_Pending(fragment, REFERENCE_LAYER, 0, 0, ()))
            return branch
        else:
            raise ExtensionError(f"unknown fragment {fragment!r}")
    if not isinstance(fragment, Patch):
        raise ExtensionError(f"cannot explicitate {type(fragment).__name__}")
    code = system.memory.find(fragment)
    source = Source(f"code:{code}", "extensional") if code is not None else Source("input", "input")
    layer = fragment.layer
    ox, oy = fragment.anchor.offset if fragment.anchor else (0, 0)
    branch.place(fragment, layer, ox, oy, source, ())
    return branch


def explicitate(
    system: RepresentationalSystem,
    fragment,
    budget: int | None = None,
) -> tuple[WUnfold, ...] | IncoherenceReport:
    """Eliminate every symbol of ``fragment`` by iterative projection.

    Returns the w-unfolds of every surviving alternative, ordered by their
    alternative tags. When every branch fails, the report of the first
    failing branch is returned. Tokens are processed in row-major order per
    layer, one substitution round at a time, at most ``budget`` rounds.
    """
    budget = default_budget() if budget is None else budget
    if budget < 1:
        raise ExtensionError("budget must be >= 1")
    branches = [_resolve_fragment(system, fragment)]
    done: list[_Branch] = []
    failures: list[tuple[tuple, IncoherenceReport]] = []

    rounds = 0
    while branches:
        live = []
        for branch in branches:
            if not branch.pending:
                done.append(branch)
            else:
                live.append(branch)
        if not live:
            break
        if rounds >= budget:
            for branch in live:
                first = min(branch.pending, key=_Pending.key)
                failures.append((branch.alternatives, IncoherenceReport(
                    "intrinsic", "budget", first.ancestry + (first.unit,),
                    alternatives=branch.alternatives,
                )))
            break
        rounds += 1
        branches = []
        for branch in live:
            branches.extend(_substitution_round(system, branch, failures))

    if done:
        done.sort(key=lambda b: b.alternatives)
        return tuple(WUnfold(b.alternatives, b.display()) for b in done)
    failures.sort(key=lambda item: item[0])
    return failures[0][1]


def _substitution_round(system, branch: _Branch, failures) -> list[_Branch]:
    tokens = sorted(branch.pending, key=_Pending.key)
    seen = set()
    current = [branch]
    for b in current:
        b.pending = []
    for token in tokens:
        if (token.layer, token.x, token.y, token.unit) in seen:
            continue
        seen.add((token.layer, token.x, token.y, token.unit))
        if token.unit in token.ancestry:
            start = token.ancestry.index(token.unit)
            for b in current:
                failures.append((b.alternatives, IncoherenceReport(
                    "intrinsic", "cycle", token.ancestry[start:],
                    cause=(f"unit:{token.unit}",), alternatives=b.alternatives,
                )))
            return []
        images = system.images(token.unit) if token.unit in system.units else []
        if not images:
            for b in current:
                failures.append((b.alternatives, IncoherenceReport(
                    "intrinsic", "no-content", (token.unit,),
                    cause=(f"unit:{token.unit}",), alternatives=b.alternatives,
                )))
            return []
        common = [i for i in images if i.alt is None]
        alts = sorted({i.alt for i in images if i.alt is not None})
        groups = [(None, common)] if not alts else [
            (tag, common + [i for i in images if i.alt == tag]) for tag in alts
        ]
        ancestry = token.ancestry + (token.unit,)
        nxt = []
        for b in current:
            for n, (tag, group) in enumerate(groups):
                target = b if n == len(groups) - 1 else b.clone()
                if tag is not None:
                    target.alternatives = target.alternatives + ((token.unit, tag),)
                clashes = []
                for image in group:
                    patch, layer, ox, oy = _placement(system, image, token)
                    clashes.extend(
                        target.place(patch, layer, ox, oy, _image_source(image), ancestry)
                    )
                if clashes:
                    kind, cause = _classify(clashes)
                    failures.append((target.alternatives, IncoherenceReport(
                        kind, "conflict", cells=tuple(c for c, _, _ in clashes),
                        cause=cause, alternatives=target.alternatives,
                    )))
                else:
                    nxt.append(target)
        current = nxt
        if not current:
            return []
    return current


# -- navigation -----------------------------------------------------------------------


@dataclass(frozen=True)
class Path:
    situations: tuple[str, ...]
    links: tuple[str, ...]
    ungrounded: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.links) != max(len(self.situations) - 1, 0):
            raise ExtensionError("a path needs exactly one link between consecutive situations")

    @property
    def flagged(self) -> bool:
        """True when the path takes at least one artificial step."""
        return bool(self.ungrounded)

    def verify(self, system: RepresentationalSystem) -> bool:
        for (a, b), lid in zip(zip(self.situations, self.situations[1:]), self.links):
            link = system.links.get(lid)
            if link is None or set(link.endpoints) != {a, b}:
                return False
        return True


def _adjacency(system: RepresentationalSystem) -> dict[str, list[Link]]:
    adj = {sid: [] for sid in system.situations}
    for link in sorted(system.links.values(), key=lambda l: l.id):
        a, b = link.endpoints
        adj[a].append(link)
        if b != a:
            adj[b].append(link)
    return adj


def find_path(system: RepresentationalSystem, start: str, goal: str) -> Path | None:
    """Shortest path by link count; ties go to the smallest link-id sequence."""
    system.situation(start)
    system.situation(goal)
    adj = _adjacency(system)
    dist = {goal: 0}
    queue = deque([goal])
    while queue:
        node = queue.popleft()
        for link in adj[node]:
            other = link.other(node)
            if other not in dist:
                dist[other] = dist[node] + 1
                queue.append(other)
    if start not in dist:
        return None
    situations = [start]
    links = []
    node = start
    while node != goal:
        step = min(
            (link for link in adj[node] if dist.get(link.other(node)) == dist[node] - 1),
            key=lambda l: l.id,
        )
        links.append(step.id)
        node = step.other(node)
        situations.append(node)
    ungrounded = tuple(lid for lid in links if not system.links[lid].grounded)
    return Path(tuple(situations), tuple(links), ungrounded)


# -- unifying representations -----------------------------------------------------------


@dataclass(frozen=True)
class UnifyingRepresentation:
    system: str
    situations: frozenset[str]
    links: frozenset[Link] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "situations", frozenset(self.situations))
        object.__setattr__(self, "links", frozenset(self.links))
        if not self.situations:
            raise ExtensionError("a unifying representation needs at least one situation")
        for link in self.links:
            if not set(link.endpoints) <= self.situations:
                raise ExtensionError(f"link {link.id} leaves the representation")
        if len(_components(self.situations, self.links)) != 1:
            raise ExtensionError("a unifying representation must be in one piece")

    @property
    def link_ids(self) -> frozenset[str]:
        return frozenset(l.id for l in self.links)


def _components(nodes: Iterable[str], links: Iterable[Link]) -> list[set[str]]:
    parent = {n: n for n in nodes}

    def find(n):
        while parent[n] != n:
            parent[n] = parent[parent[n]]
            n = parent[n]
        return n

    for link in links:
        a, b = (find(e) for e in link.endpoints)
        if a != b:
            parent[max(a, b)] = min(a, b)
    groups: dict[str, set[str]] = {}
    for n in parent:
        groups.setdefault(find(n), set()).add(n)
    return sorted(groups.values(), key=min)


def union(reps: Iterable[UnifyingRepresentation]) -> frozenset[UnifyingRepresentation]:
    """Merge representations by identifying shared situations and links."""
    reps = list(reps)
    if not reps:
        return frozenset()
    systems = {r.system for r in reps}
    if len(systems) > 1:
        raise ExtensionError(f"representations from several systems: {sorted(systems)}")
    nodes = set().union(*(r.situations for r in reps))
    links: dict[str, Link] = {}
    for rep in reps:
        for link in rep.links:
            if links.setdefault(link.id, link) != link:
                raise ExtensionError(f"link id {link.id} names two different links")
    system = systems.pop()
    out = set()
    for group in _components(nodes, links.values()):
        inner = frozenset(l for l in links.values() if set(l.endpoints) <= group)
        out.add(UnifyingRepresentation(system, frozenset(group), inner))
    return frozenset(out)


def representation(system: RepresentationalSystem, situations: Iterable[str],
                   links: Iterable[str] = ()) -> UnifyingRepresentation:
    for sid in situations:
        system.situation(sid)
    return UnifyingRepresentation(
        system.name, frozenset(situations), frozenset(system.links[l] for l in links)
    )


def path_representation(system: RepresentationalSystem, path: Path) -> UnifyingRepresentation:
    return representation(system, path.situations, path.links)


def register(system: RepresentationalSystem, rep: UnifyingRepresentation) -> None:
    system._mutable()
    if rep.system != system.name:
        raise ExtensionError("representation belongs to another system")
    system.representations.append(rep)


def representational_space(system: RepresentationalSystem) -> frozenset[UnifyingRepresentation]:
    """Union of every registered representation, every link and every situation.

    No coherence filtering happens here: components may contradict each other.
    """
    reps = [UnifyingRepresentation(system.name, frozenset([sid])) for sid in system.situations]
    reps += [
        UnifyingRepresentation(system.name, frozenset(link.endpoints), frozenset([link]))
        for link in system.links.values()
    ]
    reps += list(system.representations)
    return union(reps)


__all__ = [
    "DEFAULT_BUDGET", "ExtensionError", "IncoherenceReport", "Path", "Source",
    "UnifyingRepresentation", "WUnfold", "default_budget", "explicitate", "find_path",
    "focus", "path_representation", "project", "register", "representation",
    "representational_space", "union",
]
