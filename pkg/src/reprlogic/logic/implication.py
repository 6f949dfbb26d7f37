"""Particular implications, laws, and the mapping a law induces.

A particular implication "given A, B" has three outcomes in a world: it
holds when both contents are present, fails when only the antecedent is,
and has *no content* when the antecedent is absent. That last outcome is
never collapsed into a truth value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from ..extension import Path
from ..web import (
    ObjectRef,
    Proposition,
    RepresentationalSystem,
    WebError,
    resolve_term,
    situation_bears,
)
from .connectives import WorldRef, present


class Outcome(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    NO_CONTENT = "no-content"


@dataclass(frozen=True)
class ParticularImplication:
    antecedent: object
    consequent: object
    scenario: Path | None = field(default=None, compare=False)

    def substitute(self, old: str, new) -> ParticularImplication:
        return ParticularImplication(
            self.antecedent.substitute(old, new), self.consequent.substitute(old, new)
        )

    def terms(self) -> set[str]:
        return self.antecedent.terms() | self.consequent.terms()

    def resolved(self, system: RepresentationalSystem | None) -> ParticularImplication:
        return ParticularImplication(
            _resolve(system, self.antecedent), _resolve(system, self.consequent), self.scenario
        )

    def __str__(self) -> str:
        return f"From {self.antecedent}, {self.consequent}"


def _resolve(system, content):
    if isinstance(content, Proposition):
        return Proposition(resolve_term(system, content.subject), content.predicate,
                           content.polarity, content.bearing)
    if isinstance(content, ObjectRef):
        return ObjectRef(resolve_term(system, content.term))
    return content


def implicate(antecedent, consequent, scenario: Path | None = None,
              system: RepresentationalSystem | None = None) -> ParticularImplication:
    """Build "given antecedent, consequent", optionally abbreviating ``scenario``."""
    if scenario is not None:
        if system is None:
            raise WebError("checking a scenario needs the system it runs in")
        first = system.situation(scenario.situations[0])
        last = system.situation(scenario.situations[-1])
        if not situation_bears(system, first, antecedent):
            raise WebError(f"scenario starts at {first.id}, which does not bear {antecedent}")
        if not situation_bears(system, last, consequent):
            raise WebError(f"scenario ends at {last.id}, which does not bear {consequent}")
    return ParticularImplication(antecedent, consequent, scenario)


def eval_particular_implication(system: RepresentationalSystem | None,
                                imp: ParticularImplication, world: WorldRef) -> Outcome:
    if not present(system, imp.antecedent, world):
        return Outcome.NO_CONTENT
    return Outcome.HOLDS if present(system, imp.consequent, world) else Outcome.FAILS


@dataclass(frozen=True)
class Law:
    template: ParticularImplication
    variable: str
    domain: frozenset[str]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "domain", frozenset(self.domain))
        if self.variable not in self.template.antecedent.terms():
            raise WebError(f"law variable {self.variable!r} missing from the antecedent")

    def __str__(self) -> str:
        return str(self.template)


def generalize(imp: ParticularImplication, term: str, domain: Iterable[str],
               variable: str = "x", name: str = "") -> Law:
    domain = frozenset(domain)
    if term not in imp.terms():
        raise WebError(f"term {term!r} does not occur in {imp}")
    if term not in domain:
        raise WebError(f"term {term!r} is not in the law's domain")
    if variable in imp.terms():
        raise WebError(f"variable {variable!r} already occurs in {imp}")
    return Law(imp.substitute(term, variable), variable, domain, name)


def instantiate(law: Law, term: str) -> ParticularImplication:
    if term not in law.domain:
        raise WebError(f"{term!r} is outside the domain of law {law.name or law}")
    return law.template.substitute(law.variable, term)


@dataclass(frozen=True)
class LawView:
    """A law read as a representational function from antecedents to consequents."""

    law: Law
    mapping: Mapping

    def image(self, antecedent):
        return self.mapping[antecedent]

    def __len__(self):
        return len(self.mapping)


def law_view(law: Law, system: RepresentationalSystem | None = None) -> LawView:
    mapping = {}
    for term in sorted(law.domain):
        inst = instantiate(law, term).resolved(system)
        mapping[inst.antecedent] = inst.consequent
    return LawView(law, mapping)
