"""Propositional formulas, valuations and laws of inference.

A valuation plays the part of a possible world. A law of inference holds when
every valuation making all premises true also makes the conclusion true;
generalized laws are the same check read over schema variables, since a
propositional variable already ranges over every substitution instance.
"""

from __future__ import annotations

import itertools
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence, Union


class FormulaError(ValueError):
    pass


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Not:
    arg: "Formula"

    def __str__(self):
        return f"~{_wrap(self.arg)}"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"{_wrap(self.left)} & {_wrap(self.right)}"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"{_wrap(self.left)} | {_wrap(self.right)}"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"{_wrap(self.left)} -> {_wrap(self.right)}"


Formula = Union[Var, Not, And, Or, Implies]
Valuation = Mapping[str, bool]
BINARY = (And, Or, Implies)


def _wrap(f: Formula) -> str:
    return str(f) if isinstance(f, (Var, Not)) else f"({f})"


# -- parsing ------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(->|\(|\)|~|!|&|\||[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*)")


def _tokenize(text: str) -> list[str]:
    tokens, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaError(f"unexpected character {text[pos:].strip()[:1]!r} in {text!r}")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


def parse(text: str) -> Formula:
    """Parse ``~ & | ->`` formulas; ``->`` is right-associative and binds loosest."""
    tokens = _tokenize(text)
    if not tokens:
        raise FormulaError("empty formula")
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take(expected=None):
        nonlocal pos
        tok = peek()
        if tok is None or (expected and tok != expected):
            raise FormulaError(f"expected {expected or 'a term'} in {text!r}")
        pos += 1
        return tok

    def implication():
        left = disjunction()
        if peek() == "->":
            take("->")
            return Implies(left, implication())
        return left

    def disjunction():
        left = conjunction()
        while peek() == "|":
            take("|")
            left = Or(left, conjunction())
        return left

    def conjunction():
        left = unary()
        while peek() == "&":
            take("&")
            left = And(left, unary())
        return left

    def unary():
        tok = peek()
        if tok in ("~", "!"):
            take()
            return Not(unary())
        if tok == "(":
            take("(")
            inner = implication()
            take(")")
            return inner
        if tok is None or tok in ("->", "&", "|", ")"):
            raise FormulaError(f"expected a term in {text!r}")
        return Var(take())

    result = implication()
    if pos != len(tokens):
        raise FormulaError(f"trailing input {' '.join(tokens[pos:])!r} in {text!r}")
    return result


def parse_argument(text: str) -> tuple[list[Formula], Formula]:
    """``A -> B, A |- B`` into premises and conclusion."""
    if "|-" not in text:
        raise FormulaError(f"argument {text!r} lacks '|-'")
    left, right = text.split("|-", 1)
    premises = [parse(p) for p in _split_top(left) if p.strip()]
    return premises, parse(right)


def _split_top(text: str) -> list[str]:
    parts, depth, current = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    parts.append("".join(current))
    return parts


# -- structure -----------------------------------------------------------------------


def variables(*formulas: Formula) -> list[str]:
    """Variables in order of first occurrence, left to right."""
    seen: dict[str, None] = {}

    def walk(f):
        if isinstance(f, Var):
            seen.setdefault(f.name)
        elif isinstance(f, Not):
            walk(f.arg)
        else:
            walk(f.left)
            walk(f.right)

    for f in formulas:
        walk(f)
    return list(seen)


def depth(f: Formula) -> int:
    if isinstance(f, Var):
        return 0
    if isinstance(f, Not):
        return 1 + depth(f.arg)
    return 1 + max(depth(f.left), depth(f.right))


def size(f: Formula) -> int:
    """Number of connective occurrences."""
    if isinstance(f, Var):
        return 0
    if isinstance(f, Not):
        return 1 + size(f.arg)
    return 1 + size(f.left) + size(f.right)


def substitute(f: Formula, mapping: Mapping[str, Formula]) -> Formula:
    if isinstance(f, Var):
        return mapping.get(f.name, f)
    if isinstance(f, Not):
        return Not(substitute(f.arg, mapping))
    return type(f)(substitute(f.left, mapping), substitute(f.right, mapping))


# -- evaluation ---------------------------------------------------------------------


def eval_formula(f: Formula, valuation: Valuation) -> bool:
    if isinstance(f, Var):
        try:
            return bool(valuation[f.name])
        except KeyError:
            raise FormulaError(f"valuation misses variable {f.name!r}") from None
    if isinstance(f, Not):
        return not eval_formula(f.arg, valuation)
    if isinstance(f, And):
        return eval_formula(f.left, valuation) and eval_formula(f.right, valuation)
    if isinstance(f, Or):
        return eval_formula(f.left, valuation) or eval_formula(f.right, valuation)
    if isinstance(f, Implies):
        return (not eval_formula(f.left, valuation)) or eval_formula(f.right, valuation)
    raise FormulaError(f"not a formula: {f!r}")


def valuations(names: Sequence[str]) -> Iterator[dict[str, bool]]:
    """All valuations in lexicographic order, false before true, first name slowest."""
    for values in itertools.product((False, True), repeat=len(names)):
        yield dict(zip(names, values))


def check_particular_inference(premises: Sequence[Formula], conclusion: Formula,
                               world: Valuation) -> bool:
    return all(eval_formula(p, world) for p in premises) and eval_formula(conclusion, world)


@dataclass(frozen=True)
class Verdict:
    """Outcome of a validity check: valid, or the first counterexample."""

    valid: bool
    counterexample: dict[str, bool] | None = None
    checked: int = 0

    def __bool__(self):
        return self.valid


def _first_failure(premises, conclusion, names, start: int, stop: int) -> int | None:
    n = len(names)
    for index in range(start, stop):
        world = {name: bool(index >> (n - 1 - i) & 1) for i, name in enumerate(names)}
        if all(eval_formula(p, world) for p in premises) and not eval_formula(conclusion, world):
            return index
    return None


def check_law_of_inference(
    premises: Sequence[Formula],
    conclusion: Formula,
    names: Sequence[str] | None = None,
    workers: int = 1,
) -> Verdict:
    """Semantic entailment over every valuation.

    ``names`` fixes the variable order used for the lexicographic choice of
    counterexample; by default variables are taken in order of first
    occurrence. With ``workers > 1`` the valuation space is split into
    contiguous chunks and the lowest failing index wins, so the answer does
    not depend on scheduling.
    """
    premises = list(premises)
    found = variables(*premises, conclusion)
    names = list(names) if names is not None else found
    missing = set(found) - set(names)
    if missing:
        raise FormulaError(f"undeclared variables {sorted(missing)}")
    total = 1 << len(names)
    if workers <= 1 or total < 2 * workers:
        index = _first_failure(premises, conclusion, names, 0, total)
    else:
        step = -(-total // workers)
        bounds = [(lo, min(lo + step, total)) for lo in range(0, total, step)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = list(pool.map(lambda b: _first_failure(premises, conclusion, names, *b), bounds))
        hits = [h for h in hits if h is not None]
        index = min(hits) if hits else None
    if index is None:
        return Verdict(True, None, total)
    n = len(names)
    world = {name: bool(index >> (n - 1 - i) & 1) for i, name in enumerate(names)}
    return Verdict(False, world, index + 1)


@dataclass(frozen=True)
class SchemaVerdict:
    verdict: Verdict
    instances: tuple[Verdict, ...] = ()

    @property
    def valid(self) -> bool:
        return self.verdict.valid

    @property
    def counterexample(self):
        return self.verdict.counterexample


def check_generalized_law(
    premises: Sequence[Formula],
    conclusion: Formula,
    instances: Iterable[Mapping[str, Formula]] = (),
) -> SchemaVerdict:
    """Decide a schema, then re-check any caller-supplied substitution instances."""
    verdict = check_law_of_inference(premises, conclusion)
    checked = tuple(
        check_law_of_inference([substitute(p, inst) for p in premises], substitute(conclusion, inst))
        for inst in instances
    )
    return SchemaVerdict(verdict, checked)


# -- syntactic schema matching ----------------------------------------------------------


def _match(schema: Formula, concrete: Formula, binding: dict[str, Formula]) -> bool:
    if isinstance(schema, Var):
        bound = binding.get(schema.name)
        if bound is None:
            binding[schema.name] = concrete
            return True
        return bound == concrete
    if type(schema) is not type(concrete):
        return False
    if isinstance(schema, Not):
        return _match(schema.arg, concrete.arg, binding)
    return _match(schema.left, concrete.left, binding) and _match(schema.right, concrete.right, binding)


def match_schema(
    concrete: tuple[Sequence[Formula], Formula],
    schema: tuple[Sequence[Formula], Formula],
) -> dict[str, Formula] | None:
    """Substitution turning ``schema`` into ``concrete``, premise by premise in order."""
    c_premises, c_conclusion = concrete
    s_premises, s_conclusion = schema
    if len(c_premises) != len(s_premises):
        return None
    binding: dict[str, Formula] = {}
    for s, c in zip(list(s_premises) + [s_conclusion], list(c_premises) + [c_conclusion]):
        if not _match(s, c, binding):
            return None
    return binding


SCHEMAS: dict[str, str] = {
    "modus-ponens": "p -> q, p |- q",
    "modus-tollens": "p -> q, ~q |- ~p",
    "hypothetical-syllogism": "p -> q, q -> r |- p -> r",
    "disjunctive-syllogism": "p | q, ~p |- q",
    "conjunction-introduction": "p, q |- p & q",
    "conjunction-elimination": "p & q |- p",
    "disjunction-introduction": "p |- p | q",
    "affirming-the-consequent": "p -> q, q |- p",
    "denying-the-antecedent": "p -> q, ~p |- ~q",
}


def schema(name: str) -> tuple[list[Formula], Formula]:
    return parse_argument(SCHEMAS[name])
