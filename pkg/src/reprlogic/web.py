"""The symbolic web: units, the semantic relation, memory, links and objects.

A :class:`RepresentationalSystem` couples a window of presence with the web
that codes, stores and chains patches. The semantic relation is multi-valued:
one unit may have several images, each either an extensional stored patch
(referenced by memory code) or an intensional :class:`~reprlogic.rules.Rule`.

Systems are built in a single-threaded phase and then frozen; a frozen
system refuses every mutation and can be shared freely between readers.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Mapping, Union

from .presence import (
    Anchor,
    ConflictReport,
    Patch,
    Situation,
    WindowSpec,
    fits_window,
    find_template,
    symbol_tokens,
    unify_patches,
)
from .rules import Rule
from .universe import Coord, Region, Universe

UNIT_KINDS = ("name", "predicate", "proposition-symbol", "variable", "law-label", "link-label")


class WebError(ValueError):
    pass


class FrozenSystemError(WebError):
    pass


@dataclass(frozen=True)
class SymbolicUnit:
    """A unit of the web.

    Predicate units carry the recurrence ``template`` they name; a predicate
    may also carry a finite functional ``relation`` (``donor_of``-style)
    used to resolve applied terms. Name units created from a recurrence keep
    that recurrence as their template too.
    """

    id: str
    kind: str
    template: Patch | None = None
    relation: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        if self.kind not in UNIT_KINDS:
            raise WebError(f"unknown unit kind {self.kind!r}")


@dataclass(frozen=True)
class ExtensionalImage:
    code: int
    alt: str | None = None


@dataclass(frozen=True)
class IntensionalImage:
    rule: Rule
    alt: str | None = None


Image = Union[ExtensionalImage, IntensionalImage]


@dataclass(frozen=True)
class SemanticEntry:
    unit: str
    images: tuple[Image, ...]


class MemoryStore:
    """Patches coded by an insertion counter."""

    def __init__(self):
        self._codes: dict[int, Patch] = {}
        self._next = 0

    def store(self, patch: Patch) -> int:
        code = self._next
        self._next += 1
        self._codes[code] = patch
        return code

    def retrieve(self, code: int) -> Patch:
        try:
            return self._codes[code]
        except KeyError:
            raise WebError(f"unknown code {code}") from None

    def find(self, patch: Patch) -> int | None:
        for code, stored in self._codes.items():
            if stored == patch:
                return code
        return None

    def discard(self, code: int) -> None:
        self._codes.pop(code, None)

    def __contains__(self, code) -> bool:
        return code in self._codes

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self._codes))

    def __len__(self) -> int:
        return len(self._codes)

    def items(self) -> list[tuple[int, Patch]]:
        return sorted(self._codes.items())

    def copy(self) -> MemoryStore:
        other = MemoryStore()
        other._codes = dict(self._codes)
        other._next = self._next
        return other


@dataclass(frozen=True)
class Link:
    id: str
    endpoints: tuple[str, str]
    kind: str
    grounding: Coord | None = None

    def __post_init__(self):
        if self.kind == "A-link" and self.grounding is None:
            raise WebError(f"A-link {self.id} needs a grounding alignment")
        if self.kind == "artificial" and self.grounding is not None:
            raise WebError(f"artificial link {self.id} cannot carry a grounding")
        if self.kind not in ("A-link", "artificial"):
            raise WebError(f"unknown link kind {self.kind!r}")

    @property
    def grounded(self) -> bool:
        return self.kind == "A-link"

    def other(self, situation: str) -> str:
        a, b = self.endpoints
        return b if situation == a else a


# -- terms and content descriptors --------------------------------------------


@dataclass(frozen=True)
class Apply:
    """A functional term such as ``donor_of(frag6)``."""

    functor: str
    arg: "Term"

    def __str__(self) -> str:
        return f"{self.functor}({self.arg})"


Term = Union[str, Apply]


def substitute_term(term: Term, old: str, new: Term) -> Term:
    if isinstance(term, Apply):
        return Apply(term.functor, substitute_term(term.arg, old, new))
    return new if term == old else term


def term_atoms(term: Term) -> Iterator[str]:
    if isinstance(term, Apply):
        yield from term_atoms(term.arg)
    else:
        yield term


@dataclass(frozen=True)
class Proposition:
    subject: Term
    predicate: str
    polarity: bool = True
    bearing: Region | None = None

    def substitute(self, old: str, new: Term) -> Proposition:
        return replace(self, subject=substitute_term(self.subject, old, new))

    def terms(self) -> set[str]:
        return set(term_atoms(self.subject))

    def __str__(self) -> str:
        sign = "" if self.polarity else "!"
        return f"{sign}{self.predicate}({self.subject})"


@dataclass(frozen=True)
class ObjectRef:
    """Content given by an object itself rather than by a proposition."""

    term: Term

    def substitute(self, old: str, new: Term) -> ObjectRef:
        return ObjectRef(substitute_term(self.term, old, new))

    def terms(self) -> set[str]:
        return set(term_atoms(self.term))

    def __str__(self) -> str:
        return f"@{self.term}"


@dataclass(frozen=True)
class Atom:
    """An elementary proposition symbol, true or false in a world."""

    name: str

    def substitute(self, old: str, new: Term) -> Atom:
        return self

    def terms(self) -> set[str]:
        return set()

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class OpenExpression:
    body: object
    variable: str
    domain: frozenset[str]

    def instantiate(self, term: str):
        if term not in self.domain:
            raise WebError(f"{term!r} is outside the domain of {self.variable}")
        return self.body.substitute(self.variable, term)

    def __str__(self) -> str:
        return f"{self.body} [{self.variable} in {{{', '.join(sorted(self.domain))}}}]"


def variabilize(expression, term: str, domain: Iterable[str], variable: str = "x") -> OpenExpression:
    """Replace ``term`` by ``variable`` in ``expression`` (a proposition or implication)."""
    domain = frozenset(domain)
    if term not in expression.terms():
        raise WebError(f"term {term!r} does not occur in {expression}")
    if term not in domain:
        raise WebError(f"term {term!r} is not in the domain")
    if variable in expression.terms():
        raise WebError(f"variable {variable!r} already occurs in {expression}")
    return OpenExpression(expression.substitute(term, variable), variable, domain)


@dataclass(frozen=True)
class ObjectRecord:
    unit: str
    situations: frozenset[str]


# -- the system -----------------------------------------------------------------


class RepresentationalSystem:
    def __init__(self, window: WindowSpec, name: str = "S"):
        self.name = name
        self.window = window
        self.memory = MemoryStore()
        self.units: dict[str, SymbolicUnit] = {}
        self.semantics: dict[str, list[Image]] = {}
        self.links: dict[str, Link] = {}
        self.situations: dict[str, Situation] = {}
        self.objects: dict[str, ObjectRecord] = {}
        self.propositions: list[Proposition] = []
        self.laws: dict = {}
        self.representations: list = []
        self.labels: dict[int, str] = {}
        self.bound_universe: Universe | None = None
        self.frozen = False
        self._next_rule = 0
        self._next_link = 0

    # build-phase guards

    def _mutable(self) -> None:
        if self.frozen:
            raise FrozenSystemError(f"system {self.name} is frozen")

    def freeze(self) -> RepresentationalSystem:
        self.validate()
        self.frozen = True
        return self

    def bind(self, universe: Universe) -> RepresentationalSystem:
        self._mutable()
        if universe.schema != self.window.schema:
            raise WebError("universe schema differs from the system window schema")
        self.bound_universe = universe
        return self

    # units and semantics

    def add_unit(self, id: str, kind: str = "name", template: Patch | None = None,
                 relation: Mapping[str, str] | None = None) -> SymbolicUnit:
        self._mutable()
        if id in self.units:
            raise WebError(f"duplicate unit id {id!r}")
        unit = SymbolicUnit(id, kind, template, tuple(sorted((relation or {}).items())))
        self.units[id] = unit
        self.semantics[id] = []
        return unit

    def unit(self, id: str) -> SymbolicUnit:
        try:
            return self.units[id]
        except KeyError:
            raise WebError(f"unknown unit {id!r}") from None

    def add_image(self, unit: str, image: Image) -> None:
        self._mutable()
        self.unit(unit)
        if isinstance(image, ExtensionalImage) and image.code not in self.memory:
            raise WebError(f"unknown code {image.code}")
        if image not in self.semantics[unit]:
            self.semantics[unit].append(image)

    def add_rule(self, unit: str, kind: str, params: Mapping[str, str] | None = None,
                 anchor: Anchor | None = None, alt: str | None = None,
                 rule_id: str | None = None) -> Rule:
        if rule_id is None:
            rule_id = f"r{self._next_rule}"
            self._next_rule += 1
        rule = Rule(rule_id, kind, params or {}, anchor)
        self.add_image(unit, IntensionalImage(rule, alt))
        return rule

    def entry(self, unit: str) -> SemanticEntry:
        self.unit(unit)
        return SemanticEntry(unit, tuple(self.semantics[unit]))

    def images(self, unit: str) -> list[Image]:
        """Images ordered by code id, then rule id."""
        self.unit(unit)
        ext = sorted(
            (i for i in self.semantics[unit] if isinstance(i, ExtensionalImage)),
            key=lambda i: (i.code, i.alt or ""),
        )
        ints = sorted(
            (i for i in self.semantics[unit] if isinstance(i, IntensionalImage)),
            key=lambda i: (i.rule.id, i.alt or ""),
        )
        return ext + ints

    def snapshot(self) -> dict[str, tuple[Image, ...]]:
        return {unit: tuple(images) for unit, images in self.semantics.items()}

    # situations

    def add_situation(self, id: str, patch: Patch | int, anchor: Anchor | None = None) -> Situation:
        self._mutable()
        if id in self.situations:
            raise WebError(f"duplicate situation id {id!r}")
        code = None
        if isinstance(patch, int):
            code = patch
            patch = self.memory.retrieve(code)
        anchor = anchor or patch.anchor
        if anchor is None:
            raise WebError(f"situation {id!r} needs an anchor")
        if not fits_window(patch, self.window):
            raise WebError(f"situation {id!r}: patch does not fit the window")
        if self.bound_universe is not None and anchor.world not in self.bound_universe.worlds:
            raise WebError(f"situation {id!r}: unknown world {anchor.world!r}")
        situation = Situation(id, patch.with_anchor(anchor), anchor, code)
        self.situations[id] = situation
        return situation

    def situation(self, id: str) -> Situation:
        try:
            return self.situations[id]
        except KeyError:
            raise WebError(f"unknown situation {id!r}") from None

    def label(self, code: int) -> str:
        return self.labels.get(code, f"#{code}")

    # validation

    def validate(self) -> None:
        for code, patch in self.memory.items():
            for token in symbol_tokens(patch):
                if token.unit not in self.units:
                    raise WebError(
                        f"patch {self.label(code)} carries token of unknown unit {token.unit!r}"
                    )
        for link in self.links.values():
            for end in link.endpoints:
                if end not in self.situations:
                    raise WebError(f"link {link.id} names unknown situation {end!r}")
            if link.grounded:
                a, b = (self.situations[e].patch for e in link.endpoints)
                if isinstance(unify_patches(a, b, link.grounding), ConflictReport):
                    raise WebError(f"A-link {link.id} no longer unifies its endpoints")
        for record in self.objects.values():
            for sid in record.situations:
                if sid not in self.situations:
                    raise WebError(f"object {record.unit} names unknown situation {sid!r}")

    # copies with pieces removed, used to build counterfactual variants

    def copy(self) -> RepresentationalSystem:
        other = RepresentationalSystem(self.window, self.name)
        other.memory = self.memory.copy()
        other.units = dict(self.units)
        other.semantics = {u: list(imgs) for u, imgs in self.semantics.items()}
        other.links = dict(self.links)
        other.situations = dict(self.situations)
        other.objects = dict(self.objects)
        other.propositions = list(self.propositions)
        other.laws = dict(self.laws)
        other.representations = list(self.representations)
        other.labels = dict(self.labels)
        other.bound_universe = self.bound_universe
        other._next_rule = self._next_rule
        other._next_link = self._next_link
        other.frozen = False
        return other

    def without_image(self, unit: str, image: Image | int) -> RepresentationalSystem:
        other = self.copy()
        if isinstance(image, int):
            image = next(
                (i for i in other.semantics[unit]
                 if isinstance(i, ExtensionalImage) and i.code == image),
                None,
            )
        other.semantics[unit] = [i for i in other.semantics[unit] if i != image]
        return other

    def without_rules(self, unit: str) -> RepresentationalSystem:
        other = self.copy()
        other.semantics[unit] = [
            i for i in other.semantics[unit] if not isinstance(i, IntensionalImage)
        ]
        return other

    def without_code(self, code: int) -> RepresentationalSystem:
        """Drop a stored patch together with everything that depends on it."""
        other = self.copy()
        other.memory.discard(code)
        for unit in other.semantics:
            other.semantics[unit] = [
                i for i in other.semantics[unit]
                if not (isinstance(i, ExtensionalImage) and i.code == code)
            ]
        gone = {sid for sid, s in other.situations.items() if s.code == code}
        for sid in gone:
            del other.situations[sid]
        other.links = {
            lid: link for lid, link in other.links.items()
            if not gone.intersection(link.endpoints)
        }
        other.objects = {
            u: ObjectRecord(u, rec.situations - gone) for u, rec in other.objects.items()
        }
        return other

    def without_link(self, link_id: str) -> RepresentationalSystem:
        other = self.copy()
        other.links.pop(link_id, None)
        return other


# -- operations -------------------------------------------------------------------


def store_eaf(system: RepresentationalSystem, patch: Patch, label: str | None = None) -> int:
    system._mutable()
    if not fits_window(patch, system.window):
        raise WebError(
            f"patch {patch.width}x{patch.height} does not fit window "
            f"{system.window.width}x{system.window.height}"
        )
    code = system.memory.store(patch)
    if label is not None:
        system.labels[code] = label
    return code


def retrieve_eaf(system: RepresentationalSystem, code: int) -> Patch:
    return system.memory.retrieve(code)


def _code_for(system: RepresentationalSystem, patch: Patch) -> int:
    code = system.memory.find(patch)
    return store_eaf(system, patch) if code is None else code


def name_recurrence(
    system: RepresentationalSystem,
    patches: Iterable[Patch],
    template: Patch,
    unit_id: str | None = None,
) -> SymbolicUnit:
    """Give a name to a template recurring in every one of ``patches``."""
    patches = list(patches)
    if not patches:
        raise WebError("no recurrence: empty patch set")
    for patch in patches:
        if find_template(patch, template) is None:
            raise WebError("no recurrence: template absent from a patch")
    unit_id = unit_id or f"n{len(system.units)}"
    unit = system.add_unit(unit_id, "name", template=template)
    for patch in patches:
        system.add_image(unit_id, ExtensionalImage(_code_for(system, patch)))
    return unit


def predicate(
    system: RepresentationalSystem,
    situation: str | Situation,
    template: Patch,
    predicate_id: str | None = None,
) -> Proposition:
    """Analyse a situation into a subject bearing the recurrence ``template``."""
    if isinstance(situation, Situation):
        situation = situation.id
    sit = system.situation(situation)
    offset = find_template(sit.patch, template)
    if offset is None:
        raise WebError(f"template absent from situation {situation!r}")

    pred = next(
        (
            u for u in system.units.values()
            if u.kind == "predicate" and u.template == template
            and (predicate_id is None or u.id == predicate_id)
        ),
        None,
    )
    if pred is None:
        pred = system.add_unit(predicate_id or f"p{len(system.units)}", "predicate", template)

    subject_id = f"this_{situation}"
    if subject_id not in system.units:
        system.add_unit(subject_id, "name")
    code = sit.code if sit.code is not None else _code_for(system, sit.patch)
    system.add_image(subject_id, ExtensionalImage(code))

    bearing = Region(offset[0], offset[1], template.width, template.height)
    prop = Proposition(subject_id, pred.id, True, bearing)
    system.propositions.append(prop)
    return prop


def add_link(
    system: RepresentationalSystem,
    a: str,
    b: str,
    alignment: Coord | None = None,
    link_id: str | None = None,
) -> Link:
    system._mutable()
    left, right = system.situation(a), system.situation(b)
    if link_id is None:
        link_id = f"L{system._next_link}"
        system._next_link += 1
    if link_id in system.links:
        raise WebError(f"duplicate link id {link_id!r}")
    if alignment is None:
        link = Link(link_id, (a, b), "artificial")
    else:
        result = unify_patches(left.patch, right.patch, tuple(alignment))
        if isinstance(result, ConflictReport):
            cells = "; ".join(str(c) for c in result.cells)
            raise WebError(f"not groundable: {a} and {b} clash at {cells}")
        link = Link(link_id, (a, b), "A-link", tuple(alignment))
    system.links[link_id] = link
    return link


def build_object(system: RepresentationalSystem, unit: str, situations: Iterable[str]) -> ObjectRecord:
    system._mutable()
    system.unit(unit)
    situations = frozenset(situations)
    for sid in sorted(situations):
        sit = system.situation(sid)
        code = sit.code if sit.code is not None else _code_for(system, sit.patch)
        system.add_image(unit, ExtensionalImage(code))
    existing = system.objects.get(unit)
    record = ObjectRecord(unit, situations | (existing.situations if existing else frozenset()))
    system.objects[unit] = record
    return record


def situation_bears(system: RepresentationalSystem, situation: Situation, content) -> bool:
    """Whether a situation displays ``content`` (used for scenario endpoints)."""
    if isinstance(content, Proposition):
        subject = content.subject
        if not isinstance(subject, str) or subject not in system.units:
            return False
        codes = {i.code for i in system.images(subject) if isinstance(i, ExtensionalImage)}
        record = system.objects.get(subject)
        mine = (situation.code in codes) or any(
            system.memory.retrieve(c).with_anchor(None) == situation.patch.with_anchor(None)
            for c in codes
        ) or (record is not None and situation.id in record.situations)
        if not mine:
            return False
        template = system.unit(content.predicate).template
        if template is None:
            return content.polarity
        found = find_template(situation.patch, template) is not None
        return found == content.polarity
    if isinstance(content, ObjectRef):
        term = content.term
        if not isinstance(term, str) or term not in system.units:
            return False
        codes = {i.code for i in system.images(term) if isinstance(i, ExtensionalImage)}
        record = system.objects.get(term)
        return situation.code in codes or (record is not None and situation.id in record.situations)
    if isinstance(content, Patch):
        if content.anchor is None or content.anchor.world != situation.anchor.world:
            return False
        dx = content.anchor.x - situation.anchor.x
        dy = content.anchor.y - situation.anchor.y
        return not isinstance(unify_patches(situation.patch, content, (dx, dy)), ConflictReport)
    return False


def resolve_term(system: RepresentationalSystem | None, term: Term) -> Term:
    """Evaluate functional terms through their predicate's relation table."""
    if not isinstance(term, Apply):
        return term
    arg = resolve_term(system, term.arg)
    if system is None or term.functor not in system.units:
        return Apply(term.functor, arg)
    table = dict(system.unit(term.functor).relation)
    if isinstance(arg, str) and arg in table:
        return table[arg]
    return Apply(term.functor, arg)


__all__ = [
    "Apply", "Atom", "ExtensionalImage", "FrozenSystemError", "Image", "IntensionalImage",
    "Link", "MemoryStore", "ObjectRecord", "ObjectRef", "OpenExpression", "Proposition",
    "RepresentationalSystem", "SemanticEntry", "SymbolicUnit", "Term", "UNIT_KINDS",
    "WebError", "add_link", "build_object", "name_recurrence", "predicate", "resolve_term",
    "retrieve_eaf", "situation_bears", "store_eaf", "substitute_term", "variabilize",
]
