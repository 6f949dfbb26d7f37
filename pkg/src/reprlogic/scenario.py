"""Scenario files: a plain-text declaration of a universe plus a system.

One declaration per line, ``#`` starts a comment. Sections appear in the
order ``SCHEMA WORLD WINDOW PATCH UNIT SEM LINK SITUATION OBJECT LAW QUERY``
(a section keyword may repeat, but never after a later one). ``SCHEMA``,
``WORLD`` and ``PATCH`` open blocks whose body lines follow them::

    SCHEMA resolution=3
    attr color red blue green

    WORLD real 2x2 reference
    fill color=green
    0,0 color=red
    fact notebook_seen

    WINDOW 2x2

    PATCH red_seen 2x2 at=real@0,0
    0,0 color=red
    PATCH note 2x2
    0,0 token=C

    UNIT C name
    SEM C code=red_seen
    SITUATION s1 patch=red_seen
    LINK L1 s1 s2 align=2,0        # or align=auto, or artificial
    OBJECT C s1
    LAW flood var=x domain=a,b antecedent=rain(x) consequent=flood(x)
    QUERY mp validity A -> B, A |- B

Body lines of ``WORLD`` and ``PATCH`` blocks are ``fill a=v ...``,
``rect x,y,w,h a=v ...`` or ``x,y a=v ... [token=UNIT]``; worlds also take
``fact NAME``. Patch flags: ``at=WORLD@X,Y``, ``transient`` (a display that
is never stored in memory) and ``template`` (a recurrence template of any
size, not stored).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .extension import ExtensionError
from .logic.formula import FormulaError, parse_argument
from .logic.implication import Law, ParticularImplication
from .presence import Anchor, Patch, PresenceError, WindowSpec
from .rules import RULE_KINDS
from .universe import AttributeSchema, Universe, UniverseError, World, build_universe
from .web import (
    UNIT_KINDS,
    Apply,
    Atom,
    ExtensionalImage,
    ObjectRef,
    Proposition,
    RepresentationalSystem,
    WebError,
    add_link,
    build_object,
    store_eaf,
)

SECTIONS = ("SCHEMA", "WORLD", "WINDOW", "PATCH", "UNIT", "SEM", "LINK",
            "SITUATION", "OBJECT", "LAW", "QUERY")
BLOCKS = ("SCHEMA", "WORLD", "PATCH")
QUERY_KINDS = ("validity", "coherence", "path", "implication", "project")


class ScenarioError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class Query:
    id: str
    kind: str
    text: str
    line: int


@dataclass
class Scenario:
    schema: AttributeSchema
    universe: Universe | None
    window: WindowSpec | None
    system: RepresentationalSystem | None
    patches: dict[str, Patch] = field(default_factory=dict)
    templates: dict[str, Patch] = field(default_factory=dict)
    codes: dict[str, int] = field(default_factory=dict)
    queries: list[Query] = field(default_factory=list)

    def counts(self) -> dict[str, int]:
        s = self.system
        return {
            "worlds": len(self.universe.worlds) if self.universe else 0,
            "patches": len(self.patches),
            "units": len(s.units) if s else 0,
            "situations": len(s.situations) if s else 0,
            "links": len(s.links) if s else 0,
            "objects": len(s.objects) if s else 0,
            "laws": len(s.laws) if s else 0,
            "queries": len(self.queries),
        }


# -- small parsers ----------------------------------------------------------------

_IDENT = r"[A-Za-z_][A-Za-z0-9_\-]*"
_SIZE = re.compile(r"^(\d+)x(\d+)$")
_COORD = re.compile(r"^(-?\d+),(-?\d+)$")
_ANCHOR = re.compile(rf"^({_IDENT})@(-?\d+),(-?\d+)$")


def _size(text: str, line: int) -> tuple[int, int]:
    m = _SIZE.match(text)
    if not m:
        raise ScenarioError(f"expected WxH, got {text!r}", line)
    return int(m.group(1)), int(m.group(2))


def _anchor(text: str, line: int) -> Anchor:
    m = _ANCHOR.match(text)
    if not m:
        raise ScenarioError(f"expected WORLD@X,Y, got {text!r}", line)
    return Anchor(m.group(1), int(m.group(2)), int(m.group(3)))


def _pairs(words: list[str], line: int) -> dict[str, str]:
    out = {}
    for word in words:
        if "=" not in word:
            raise ScenarioError(f"expected key=value, got {word!r}", line)
        key, value = word.split("=", 1)
        out[key] = value
    return out


def parse_term(text: str) -> Apply | str:
    text = text.strip()
    m = re.fullmatch(rf"({_IDENT})\((.+)\)", text)
    if m:
        return Apply(m.group(1), parse_term(m.group(2)))
    if not re.fullmatch(_IDENT, text):
        raise ValueError(f"bad term {text!r}")
    return text


def parse_content(text: str):
    """``pred(term)``, ``!pred(term)``, ``@term`` or a bare proposition symbol."""
    text = text.strip()
    if text.startswith("@"):
        return ObjectRef(parse_term(text[1:]))
    polarity = True
    if text.startswith("!"):
        polarity, text = False, text[1:].strip()
    m = re.fullmatch(rf"({_IDENT})\((.+)\)", text)
    if m:
        return Proposition(parse_term(m.group(2)), m.group(1), polarity)
    if re.fullmatch(_IDENT, text) and polarity:
        return Atom(text)
    raise ValueError(f"bad content descriptor {text!r}")


# -- cell blocks -------------------------------------------------------------------


class _Grid:
    def __init__(self, width: int, height: int):
        self.width, self.height = width, height
        self.content: dict[tuple[int, int], dict[str, str]] = {}
        self.tokens: dict[tuple[int, int], tuple[str, int]] = {}

    def body(self, words: list[str], line: int, schema: AttributeSchema, allow_tokens: bool):
        head = words[0]
        if head == "fill":
            cells = [(x, y) for y in range(self.height) for x in range(self.width)]
            pairs = _pairs(words[1:], line)
        elif head == "rect":
            if len(words) < 2:
                raise ScenarioError("rect needs x,y,w,h", line)
            try:
                x0, y0, w, h = (int(v) for v in words[1].split(","))
            except ValueError:
                raise ScenarioError(f"bad rectangle {words[1]!r}", line) from None
            cells = [(x, y) for y in range(y0, y0 + h) for x in range(x0, x0 + w)]
            pairs = _pairs(words[2:], line)
        else:
            m = _COORD.match(head)
            if not m:
                raise ScenarioError(f"unknown body line {head!r}", line)
            cells = [(int(m.group(1)), int(m.group(2)))]
            pairs = _pairs(words[1:], line)
        token = pairs.pop("token", None)
        if token is not None and not allow_tokens:
            raise ScenarioError("tokens are not allowed here", line)
        for attr, value in pairs.items():
            if not schema.admits(attr, value):
                raise ScenarioError(f"value {attr}={value} outside the schema", line)
        for coord in cells:
            x, y = coord
            if not (0 <= x < self.width and 0 <= y < self.height):
                raise ScenarioError(
                    f"coordinate {coord} outside extent {self.width}x{self.height}", line
                )
            if pairs:
                self.content.setdefault(coord, {}).update(pairs)
            if token is not None:
                self.tokens[coord] = (token, line)


# -- the parser ----------------------------------------------------------------------


def _lines(text: str):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line


def parse_scenario(text: str) -> Scenario:
    try:
        return _Parser().run(text)
    except ScenarioError:
        raise
    except (UniverseError, PresenceError, WebError, ExtensionError, FormulaError) as exc:
        raise ScenarioError(str(exc)) from exc


class _Parser:
    def __init__(self):
        self.rank = -1
        self.schema_attrs: dict[str, list[str]] = {}
        self.resolution: int | None = None
        self.schema: AttributeSchema | None = None
        self.worlds: list[tuple[dict, _Grid, set, int]] = []
        self.window: WindowSpec | None = None
        self.patch_decls: list[tuple[str, _Grid, dict, int]] = []
        self.block = None
        self.scenario: Scenario | None = None
        self.system: RepresentationalSystem | None = None
        self.universe: Universe | None = None
        self.built = False
        self.schema_declared = False
        self.tokens_checked = False
        self.token_refs: list = []
        self.pending_links: list = []

    def run(self, text: str) -> Scenario:
        for number, line in _lines(text):
            words = line.split()
            head = words[0]
            if head.isupper():
                self.header(head, words, number)
            elif self.block is not None:
                self.block(words, number)
            else:
                raise ScenarioError(f"unexpected line {line!r} outside a block", number)
        if self.schema is None:
            self.finish_schema(None)
        self.build_base(None)
        self.flush_links()
        self.check_tokens()
        system = self.system
        if system is not None:
            system.freeze()
        return self.scenario

    # section bookkeeping

    def header(self, head: str, words: list[str], line: int):
        if head not in SECTIONS:
            raise ScenarioError(f"unknown section {head!r}", line)
        rank = SECTIONS.index(head)
        if rank < self.rank:
            raise ScenarioError(f"section {head} after {SECTIONS[self.rank]}", line)
        if head != "SCHEMA" and self.schema is None:
            self.finish_schema(line)
        if rank > SECTIONS.index("PATCH"):
            self.build_base(line)
        if rank > SECTIONS.index("SITUATION"):
            self.flush_links()
        self.rank = rank
        self.block = None
        getattr(self, f"sec_{head.lower()}")(words[1:], line)

    def finish_schema(self, line):
        if not self.schema_declared:
            raise ScenarioError("missing SCHEMA", line)
        if self.schema is None:
            try:
                self.schema = AttributeSchema.of(self.schema_attrs, self.resolution)
            except UniverseError as exc:
                raise ScenarioError(str(exc), line) from None

    # SCHEMA

    def sec_schema(self, args, line):
        if self.schema_declared:
            raise ScenarioError("SCHEMA declared twice", line)
        opts = _pairs(args, line)
        if "resolution" in opts:
            self.resolution = int(opts["resolution"])
        self.schema_attrs = {}
        self.schema_declared = True

        def body(words, n):
            if words[0] != "attr" or len(words) < 3:
                raise ScenarioError("expected 'attr NAME VALUE...'", n)
            if words[1] in self.schema_attrs:
                raise ScenarioError(f"duplicate attribute {words[1]!r}", n)
            self.schema_attrs[words[1]] = words[2:]

        self.block = body

    # WORLD

    def sec_world(self, args, line):
        if len(args) < 2:
            raise ScenarioError("expected 'WORLD ID WxH [reference]'", line)
        wid = args[0]
        if any(w[0]["id"] == wid for w in self.worlds):
            raise ScenarioError(f"duplicate world id {wid!r}", line)
        width, height = _size(args[1], line)
        flags = set(args[2:])
        unknown = flags - {"reference"}
        if unknown:
            raise ScenarioError(f"unknown world flag {sorted(unknown)[0]!r}", line)
        grid = _Grid(width, height)
        facts: set[str] = set()
        self.worlds.append(({"id": wid, "width": width, "height": height,
                             "reference": "reference" in flags}, grid, facts, line))

        def body(words, n):
            if words[0] == "fact":
                if len(words) != 2:
                    raise ScenarioError("expected 'fact NAME'", n)
                facts.add(words[1])
            else:
                grid.body(words, n, self.schema, allow_tokens=False)

        self.block = body

    # WINDOW

    def sec_window(self, args, line):
        if self.window is not None:
            raise ScenarioError("WINDOW declared twice", line)
        if len(args) != 1:
            raise ScenarioError("expected 'WINDOW WxH'", line)
        width, height = _size(args[0], line)
        try:
            self.window = WindowSpec(width, height, self.schema)
        except PresenceError as exc:
            raise ScenarioError(str(exc), line) from None

    # PATCH

    def sec_patch(self, args, line):
        if len(args) < 2:
            raise ScenarioError("expected 'PATCH NAME WxH [flags]'", line)
        name = args[0]
        if any(p[0] == name for p in self.patch_decls):
            raise ScenarioError(f"duplicate patch name {name!r}", line)
        width, height = _size(args[1], line)
        flags: dict = {}
        for word in args[2:]:
            if word in ("transient", "template"):
                flags[word] = True
            elif word.startswith("at="):
                flags["at"] = _anchor(word[3:], line)
            else:
                raise ScenarioError(f"unknown patch flag {word!r}", line)
        grid = _Grid(width, height)
        self.patch_decls.append((name, grid, flags, line))
        self.block = lambda words, n: grid.body(words, n, self.schema, allow_tokens=True)

    # system assembly once the analogical material is known

    def build_base(self, line):
        if self.built:
            return
        self.built = True
        universe = None
        if self.worlds:
            specs = []
            reference = None
            for meta, grid, facts, wline in self.worlds:
                specs.append(World(meta["id"], meta["width"], meta["height"],
                                   grid.content, frozenset(facts)))
                if meta["reference"]:
                    if reference is not None:
                        raise ScenarioError("two reference worlds", wline)
                    reference = meta["id"]
            universe = build_universe(self.schema, specs, reference)
        self.universe = universe
        system = None
        patches: dict[str, Patch] = {}
        templates: dict[str, Patch] = {}
        codes: dict[str, int] = {}
        if self.patch_decls and self.window is None:
            raise ScenarioError("PATCH declared without a WINDOW", self.patch_decls[0][3])
        if self.window is not None:
            system = RepresentationalSystem(self.window)
            if universe is not None:
                system.bind(universe)
        for name, grid, flags, pline in self.patch_decls:
            anchor = flags.get("at")
            if anchor is not None and universe is not None and anchor.world not in universe.worlds:
                raise ScenarioError(f"patch {name!r} anchored in unknown world {anchor.world!r}", pline)
            patch = Patch.from_cells(
                grid.width, grid.height, grid.content,
                {c: t for c, (t, _) in grid.tokens.items()}, anchor,
            )
            if flags.get("template"):
                templates[name] = patch
                continue
            patches[name] = patch
            if not flags.get("transient"):
                try:
                    codes[name] = store_eaf(system, patch, label=name)
                except WebError as exc:
                    raise ScenarioError(f"patch {name!r}: {exc}", pline) from None
        self.token_refs = [
            (name, unit, tline)
            for name, grid, _, _ in self.patch_decls
            for _, (unit, tline) in sorted(grid.tokens.items(), key=lambda kv: kv[1][1])
        ]
        self.system = system
        self.scenario = Scenario(self.schema, universe, self.window, system,
                                 patches, templates, codes)

    def need_system(self, line) -> RepresentationalSystem:
        if self.system is None:
            raise ScenarioError("declaration needs a WINDOW", line)
        return self.system

    def check_tokens(self):
        if self.tokens_checked or self.system is None:
            return
        for name, unit, tline in self.token_refs:
            if unit not in self.system.units:
                raise ScenarioError(f"patch {name!r} carries token of unknown unit {unit!r}", tline)
        self.tokens_checked = True

    # UNIT

    def sec_unit(self, args, line):
        system = self.need_system(line)
        if len(args) < 2:
            raise ScenarioError("expected 'UNIT ID KIND [template=P] [relation=a:b,...]'", line)
        uid, kind = args[0], args[1]
        if kind not in UNIT_KINDS:
            raise ScenarioError(f"unknown unit kind {kind!r}", line)
        opts = _pairs(args[2:], line)
        template = None
        if "template" in opts:
            template = self.scenario.templates.get(opts["template"]) or self.scenario.patches.get(opts["template"])
            if template is None:
                raise ScenarioError(f"unknown template {opts['template']!r}", line)
        relation = {}
        if "relation" in opts:
            for pair in opts["relation"].split(","):
                if ":" not in pair:
                    raise ScenarioError(f"bad relation pair {pair!r}", line)
                k, v = pair.split(":", 1)
                relation[k] = v
        if uid in system.units:
            raise ScenarioError(f"duplicate unit id {uid!r}", line)
        system.add_unit(uid, kind, template, relation)

    # SEM

    def sec_sem(self, args, line):
        system = self.need_system(line)
        self.check_tokens()
        if len(args) < 2:
            raise ScenarioError("expected 'SEM UNIT code=P | rule=KIND ...'", line)
        unit = args[0]
        if unit not in system.units:
            raise ScenarioError(f"unknown unit {unit!r}", line)
        opts = _pairs(args[1:], line)
        alt = opts.pop("alt", None)
        if "code" in opts:
            name = opts.pop("code")
            if name not in self.scenario.codes:
                raise ScenarioError(f"unknown stored patch {name!r}", line)
            if opts:
                raise ScenarioError(f"unexpected options {sorted(opts)}", line)
            system.add_image(unit, ExtensionalImage(self.scenario.codes[name], alt))
        elif "rule" in opts:
            kind = opts.pop("rule")
            if kind not in RULE_KINDS:
                raise ScenarioError(f"unknown rule kind {kind!r}", line)
            anchor = _anchor(opts.pop("at"), line) if "at" in opts else None
            rid = opts.pop("id", None)
            try:
                system.add_rule(unit, kind, opts, anchor, alt, rid)
            except (PresenceError, WebError, KeyError) as exc:
                raise ScenarioError(f"bad rule: {exc}", line) from None
        else:
            raise ScenarioError("SEM needs code= or rule=", line)

    # SITUATION / LINK / OBJECT

    def sec_situation(self, args, line):
        system = self.need_system(line)
        self.check_tokens()
        if len(args) < 2:
            raise ScenarioError("expected 'SITUATION ID patch=P [at=W@X,Y]'", line)
        sid = args[0]
        opts = _pairs(args[1:], line)
        name = opts.get("patch")
        if name not in self.scenario.patches:
            raise ScenarioError(f"unknown patch {name!r}", line)
        anchor = _anchor(opts["at"], line) if "at" in opts else None
        target = self.scenario.codes.get(name, self.scenario.patches[name])
        try:
            system.add_situation(sid, target, anchor)
        except WebError as exc:
            raise ScenarioError(str(exc), line) from None

    def sec_link(self, args, line):
        self.need_system(line)
        if len(args) != 4:
            raise ScenarioError("expected 'LINK ID A B align=DX,DY|align=auto|artificial'", line)
        self.pending_links.append((args, line))

    def flush_links(self):
        # links name situations, which are declared in a later section
        pending, self.pending_links = self.pending_links, []
        for args, line in pending:
            self.make_link(args, line)

    def make_link(self, args, line):
        system = self.system
        lid, a, b, mode = args
        for sid in (a, b):
            if sid not in system.situations:
                raise ScenarioError(f"unknown situation {sid!r}", line)
        if mode == "artificial":
            alignment = None
        elif mode == "align=auto":
            sa, sb = system.situations[a].anchor, system.situations[b].anchor
            alignment = (sb.x - sa.x, sb.y - sa.y)
        elif mode.startswith("align="):
            m = _COORD.match(mode[6:])
            if not m:
                raise ScenarioError(f"bad alignment {mode!r}", line)
            alignment = (int(m.group(1)), int(m.group(2)))
        else:
            raise ScenarioError(f"bad link mode {mode!r}", line)
        try:
            add_link(system, a, b, alignment, lid)
        except WebError as exc:
            raise ScenarioError(str(exc), line) from None

    def sec_object(self, args, line):
        system = self.need_system(line)
        if not args:
            raise ScenarioError("expected 'OBJECT UNIT SITUATION...'", line)
        unit, sids = args[0], args[1:]
        if unit not in system.units:
            raise ScenarioError(f"unknown unit {unit!r}", line)
        for sid in sids:
            if sid not in system.situations:
                raise ScenarioError(f"unknown situation {sid!r}", line)
        build_object(system, unit, sids)

    # LAW / QUERY

    def sec_law(self, args, line):
        system = self.need_system(line)
        if not args:
            raise ScenarioError("expected 'LAW NAME var=X domain=A,B antecedent=.. consequent=..'", line)
        name = args[0]
        opts = _pairs(args[1:], line)
        for key in ("var", "domain", "antecedent", "consequent"):
            if key not in opts:
                raise ScenarioError(f"LAW needs {key}=", line)
        try:
            template = ParticularImplication(parse_content(opts["antecedent"]),
                                             parse_content(opts["consequent"]))
            domain = [d for d in opts["domain"].split(",") if d]
            for term in domain:
                if term not in system.units:
                    raise ScenarioError(f"unknown domain term {term!r}", line)
            system.laws[name] = Law(template, opts["var"], frozenset(domain), name)
        except (ValueError, WebError) as exc:
            if isinstance(exc, ScenarioError):
                raise
            raise ScenarioError(str(exc), line) from None

    def sec_query(self, args, line):
        self.check_tokens()
        if len(args) < 2:
            raise ScenarioError("expected 'QUERY ID KIND ARGS'", line)
        qid, kind = args[0], args[1]
        if kind not in QUERY_KINDS:
            raise ScenarioError(f"unknown query kind {kind!r}", line)
        text = " ".join(args[2:])
        if kind == "validity":
            try:
                parse_argument(text)
            except FormulaError as exc:
                raise ScenarioError(str(exc), line) from None
        self.scenario.queries.append(Query(qid, kind, text, line))


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


# -- serialization ------------------------------------------------------------------


def format_patch(patch: Patch, name: str, flags: str = "") -> str:
    """Patch as a ``PATCH`` block, one line per non-empty cell."""
    head = f"PATCH {name} {patch.width}x{patch.height}"
    if patch.anchor is not None:
        head += f" at={patch.anchor}"
    if flags:
        head += f" {flags}"
    lines = [head]
    for (x, y), cell in patch.cells():
        parts = [f"{a}={v}" for a, v in cell.content]
        if cell.token is not None:
            parts.append(f"token={cell.token}")
        if parts:
            lines.append(f"{x},{y} " + " ".join(parts))
    return "\n".join(lines) + "\n"
