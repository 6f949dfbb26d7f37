"""Completeness, symbolic completeness, faithfulness and coherence checks.

Completeness and s-completeness tile every world with window-sized regions
(stride defaults to the window) and ask whether some extension the system
can produce reproduces the ground fragment cell for cell. Faithfulness
compares everything the system claims about an anchored place with the
ground there. Coherence is explicitation succeeding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..extension import IncoherenceReport, WUnfold, explicitate
from ..presence import Patch
from ..universe import Region, Universe, window_regions
from ..web import (
    ExtensionalImage,
    IntensionalImage,
    Proposition,
    RepresentationalSystem,
    WebError,
)
from .connectives import present
from .implication import Outcome, eval_particular_implication, instantiate


class PropertyError(ValueError):
    pass


@dataclass(frozen=True)
class Witness:
    kind: str
    fragment: str
    detail: str = ""
    sources: tuple[str, ...] = ()

    def __str__(self) -> str:
        return f"{self.kind} {self.fragment}" + (f": {self.detail}" if self.detail else "")


@dataclass(frozen=True)
class PropertyReport:
    property: str
    verdict: bool
    witnesses: tuple[Witness, ...] = ()
    skipped: tuple[str, ...] = ()
    checked: int = 0

    def __post_init__(self):
        if not self.verdict and not self.witnesses:
            raise PropertyError(f"failing {self.property} report without witnesses")

    def __bool__(self):
        return self.verdict

    def kinds(self) -> list[str]:
        return [w.kind for w in self.witnesses]


@dataclass(frozen=True)
class Coherent:
    unfolds: tuple[WUnfold, ...] = field(default=())

    verdict = True


def _universe(system: RepresentationalSystem, universe: Universe | None) -> Universe:
    universe = universe or system.bound_universe
    if universe is None:
        raise PropertyError("the system is not bound to a universe")
    if universe.schema != system.window.schema:
        raise PropertyError("schema mismatch between system and universe")
    return universe


# -- completeness --------------------------------------------------------------------


def _layer_cells(unfold: WUnfold, world: str) -> dict:
    return {
        (x, y): cell.as_dict()
        for (t, x, y), cell in unfold.display.cells.items()
        if t == world and cell.content
    }


def _patch_cells(patch: Patch, ox: int, oy: int) -> dict:
    return {(x + ox, y + oy): a for (x, y), a in patch.content().items()}


def _extensional_candidates(system, universe, symbolic_only: bool, budget) -> dict[str, list[dict]]:
    per_world: dict[str, list[dict]] = {w: [] for w in universe.worlds}
    fragments: list = []
    if symbolic_only:
        codes = sorted({
            i.code for imgs in system.semantics.values()
            for i in imgs if isinstance(i, ExtensionalImage)
        })
        fragments = [system.memory.retrieve(c) for c in codes if c in system.memory]
    else:
        fragments = [p for _, p in system.memory.items()]
        fragments += [s.patch for _, s in sorted(system.situations.items()) if s.code is None]
    for patch in fragments:
        if patch.anchor is None or patch.anchor.world not in per_world:
            continue
        world = patch.anchor.world
        result = explicitate(system, patch, budget)
        if isinstance(result, IncoherenceReport):
            per_world[world].append(_patch_cells(patch, *patch.anchor.offset))
        else:
            per_world[world].append(_layer_cells(result[0], world))
    return per_world


def _rules(system: RepresentationalSystem):
    for unit in sorted(system.semantics):
        for image in system.images(unit):
            if isinstance(image, IntensionalImage):
                yield image.rule


def _merge_all(candidates: list[dict]) -> dict:
    merged: dict = {}
    clashed: set = set()
    for cand in candidates:
        for coord, assignment in cand.items():
            slot = merged.setdefault(coord, {})
            for attr, value in assignment.items():
                if (coord, attr) in clashed:
                    continue
                if slot.get(attr, value) != value:
                    clashed.add((coord, attr))
                    del slot[attr]
                else:
                    slot[attr] = value
    return merged


def _reproduces(cells: dict, world, region: Region) -> bool:
    for coord in region.cells():
        ground = dict(world.cells.get(coord, {}))
        if cells.get(coord, {}) != ground:
            return False
    return True


def _coverage(system, universe, symbolic_only: bool, stride, budget, name: str) -> PropertyReport:
    universe = _universe(system, universe)
    window = system.window
    candidates = _extensional_candidates(system, universe, symbolic_only, budget)
    rules = list(_rules(system))
    witnesses = []
    checked = 0
    for world_id in sorted(universe.worlds):
        world = universe.worlds[world_id]
        pool = candidates[world_id]
        union = _merge_all(pool) if len(pool) > 1 else None
        for region in window_regions(world, window.width, window.height, stride):
            checked += 1
            options = list(pool) + ([union] if union is not None else [])
            for rule in rules:
                if rule.anchor is None or rule.anchor.world == world_id:
                    options.append(_patch_cells(rule.evaluate(region), region.x, region.y))
            if not any(_reproduces(cells, world, region) for cells in options):
                witnesses.append(Witness("missing-region", f"{world_id}:{region}"))
    return PropertyReport(name, not witnesses, tuple(witnesses), checked=checked)


def check_completeness(system: RepresentationalSystem, universe: Universe | None = None,
                       stride: tuple[int, int] | None = None, budget: int | None = None) -> PropertyReport:
    """Every window-aligned ground fragment is reproduced by some extension."""
    return _coverage(system, universe, False, stride, budget, "completeness")


def check_s_completeness(system: RepresentationalSystem, universe: Universe | None = None,
                         stride: tuple[int, int] | None = None, budget: int | None = None) -> PropertyReport:
    """Like completeness, using only content reachable from semantic entries."""
    return _coverage(system, universe, True, stride, budget, "s-completeness")


# -- faithfulness ----------------------------------------------------------------------


def _mismatches(patch: Patch, universe: Universe) -> list[str]:
    anchor = patch.anchor
    world = universe.worlds.get(anchor.world)
    if world is None:
        return [f"unknown world {anchor.world}"]
    out = []
    for (x, y), cell in patch.cells():
        gx, gy = x + anchor.x, y + anchor.y
        for attr, value in cell.content:
            truth = world.value((gx, gy), attr) if world.extent.contains((gx, gy)) else None
            if truth != value:
                out.append(f"({gx},{gy}) {attr}={value} but ground has {truth or 'nothing'}")
    return out


def _ground_signature(universe: Universe, patch: Patch) -> tuple:
    anchor = patch.anchor
    world = universe.worlds.get(anchor.world)
    if world is None:
        return (anchor.world,)
    box = Region(anchor.x, anchor.y, patch.width, patch.height)
    return (anchor.world,) + tuple(
        sorted(((x - anchor.x, y - anchor.y), tuple(sorted(world.assignment((x, y)).items())))
               for x, y in box.cells())
    )


def check_faithfulness(system: RepresentationalSystem,
                       universe: Universe | None = None) -> PropertyReport:
    universe = _universe(system, universe)
    window = system.window
    witnesses: list[Witness] = []
    skipped: list[str] = []
    checked = 0

    # erroneous data: every anchored content against the ground beneath it
    seen_codes = set()
    for sid, sit in sorted(system.situations.items()):
        checked += 1
        sources = (f"situation:{sid}",) + ((f"code:{sit.code}",) if sit.code is not None else ())
        if sit.code is not None:
            seen_codes.add(sit.code)
        bad = _mismatches(sit.patch, universe)
        if bad:
            witnesses.append(Witness("erroneous-datum", f"situation:{sid}", "; ".join(bad), sources))
    for unit in sorted(system.semantics):
        for image in system.images(unit):
            if isinstance(image, ExtensionalImage):
                if image.code in seen_codes:
                    continue
                seen_codes.add(image.code)
                patch = system.memory.retrieve(image.code)
                fragment, source = f"code:{image.code}", f"code:{image.code}"
            else:
                rule = image.rule
                fragment = source = f"rule:{rule.id}"
                if rule.anchor is None:
                    skipped.append(fragment)
                    continue
                patch = rule.evaluate(Region(rule.anchor.x, rule.anchor.y, window.width, window.height))
            if patch.anchor is None:
                skipped.append(fragment)
                continue
            checked += 1
            bad = _mismatches(patch, universe)
            if bad:
                witnesses.append(Witness("erroneous-datum", fragment, "; ".join(bad), (source,)))

    # ill-naming: one singular name standing for distinct ground entities
    for uid, unit in sorted(system.units.items()):
        if unit.kind != "name" or unit.template is not None or uid in system.objects:
            continue
        patches = [
            system.memory.retrieve(i.code) for i in system.images(uid)
            if isinstance(i, ExtensionalImage)
        ]
        anchored = [p for p in patches if p.anchor is not None]
        entities = {_ground_signature(universe, p) for p in anchored}
        if len(entities) > 1:
            codes = tuple(
                f"code:{i.code}" for i in system.images(uid) if isinstance(i, ExtensionalImage)
            )
            witnesses.append(Witness(
                "ill-naming", f"unit:{uid}", f"names {len(entities)} distinct ground entities", codes
            ))

    # wrong predication: asserted propositions and link alignments
    for prop in system.propositions:
        checked += 1
        worlds = _proposition_worlds(system, universe, prop)
        for world_id in worlds:
            if not present(system, prop, world_id):
                witnesses.append(Witness("wrong-predication", f"proposition:{prop}", f"false in {world_id}"))
    for lid, link in sorted(system.links.items()):
        if not link.grounded:
            continue
        checked += 1
        a, b = (system.situations[e].anchor for e in link.endpoints)
        expected = (b.x - a.x, b.y - a.y)
        if a.world != b.world or expected != tuple(link.grounding):
            witnesses.append(Witness(
                "wrong-predication", f"link:{lid}",
                f"aligned at {link.grounding} but anchors differ by {expected}"
                if a.world == b.world else f"joins worlds {a.world} and {b.world}",
                tuple(f"situation:{e}" for e in link.endpoints),
            ))

    # wrong law domain: an instance whose consequent fails in some world
    for name, law in sorted(system.laws.items()):
        for term in sorted(law.domain):
            checked += 1
            inst = instantiate(law, term)
            for world_id in sorted(universe.worlds):
                if eval_particular_implication(system, inst, world_id) is Outcome.FAILS:
                    witnesses.append(Witness(
                        "wrong-law-domain", f"law:{name}", f"{inst} fails in {world_id} at {term}"
                    ))

    return PropertyReport("faithfulness", not witnesses, tuple(witnesses), tuple(skipped), checked)


def _proposition_worlds(system, universe, prop: Proposition) -> list[str]:
    subject = prop.subject
    worlds = set()
    if isinstance(subject, str) and subject in system.units:
        for image in system.images(subject):
            if isinstance(image, ExtensionalImage):
                anchor = system.memory.retrieve(image.code).anchor
                if anchor is not None and anchor.world in universe.worlds:
                    worlds.add(anchor.world)
    if not worlds and universe.reference is not None:
        worlds.add(universe.reference)
    return sorted(worlds)


# -- coherence ----------------------------------------------------------------------


def check_coherence(system: RepresentationalSystem, fragment,
                    budget: int | None = None) -> Coherent | IncoherenceReport:
    result = explicitate(system, fragment, budget)
    if isinstance(result, IncoherenceReport):
        return result
    if not result:
        raise WebError("explicitation produced no unfold")
    return Coherent(result)


__all__ = [
    "Coherent", "PropertyError", "PropertyReport", "Witness", "check_coherence",
    "check_completeness", "check_faithfulness", "check_s_completeness",
]
