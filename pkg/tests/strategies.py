"""Hypothesis strategies shared by the property tests."""

from __future__ import annotations

from hypothesis import strategies as st

from reprlogic.logic.formula import And, Implies, Not, Or, Var
from reprlogic.presence import Anchor, Patch, WindowSpec
from reprlogic.universe import AttributeSchema, World, build_universe
from reprlogic.web import ExtensionalImage, RepresentationalSystem, add_link, store_eaf

SCHEMA = AttributeSchema.of({"color": ["red", "blue", "green"], "size": ["s", "l"]})


@st.composite
def assignments(draw, schema=SCHEMA, allow_empty=True):
    out = {}
    for name, domain in schema.attributes:
        if draw(st.booleans()):
            out[name] = draw(st.sampled_from(domain))
    if not out and not allow_empty:
        name, domain = schema.attributes[0]
        out[name] = draw(st.sampled_from(domain))
    return out


@st.composite
def patches(draw, width=None, height=None, units=(), anchor=None, schema=SCHEMA):
    width = width or draw(st.integers(1, 4))
    height = height or draw(st.integers(1, 4))
    content = {}
    tokens = {}
    for y in range(height):
        for x in range(width):
            if draw(st.booleans()):
                content[(x, y)] = draw(assignments(schema))
            if units and draw(st.integers(0, 5)) == 0:
                tokens[(x, y)] = draw(st.sampled_from(list(units)))
    return Patch.from_cells(width, height, content, tokens, anchor)


def formulas(names=("A", "B", "C"), max_leaves=8):
    leaf = st.sampled_from([Var(n) for n in names])
    return st.recursive(
        leaf,
        lambda inner: st.one_of(
            inner.map(Not),
            st.tuples(inner, inner).map(lambda t: And(*t)),
            st.tuples(inner, inner).map(lambda t: Or(*t)),
            st.tuples(inner, inner).map(lambda t: Implies(*t)),
        ),
        max_leaves=max_leaves,
    )


@st.composite
def consistent_systems(draw, corrupt=False):
    """A random world seen through a 2x2 window, with memories drawn from it.

    Every stored patch copies part of the ground at its anchor, and names
    point at those memories. ``corrupt=True`` flips one stored value, so the
    system is no longer faithful. Some names also get frames: unanchored
    patches that carry tokens of other names.
    """
    w, h = draw(st.integers(2, 6)), draw(st.integers(2, 6))
    ground = {
        (x, y): draw(assignments(allow_empty=False)) for y in range(h) for x in range(w)
    }
    universe = build_universe(SCHEMA, [World("g", w, h, ground)])
    system = RepresentationalSystem(WindowSpec(2, 2, SCHEMA)).bind(universe)

    n_units = draw(st.integers(1, 4))
    units = [f"u{i}" for i in range(n_units)]
    # one anchor per name, so a name never stands for two places
    home = {}
    for u in units:
        system.add_unit(u)
        home[u] = (draw(st.integers(0, w - 2)), draw(st.integers(0, h - 2)))
    corrupted = None
    n_patches = draw(st.integers(1, 6))
    for i in range(n_patches):
        unit = draw(st.sampled_from(units))
        ax, ay = home[unit]
        content = {}
        for dy in range(2):
            for dx in range(2):
                if draw(st.booleans()):
                    truth = ground[(ax + dx, ay + dy)]
                    keep = {a: v for a, v in truth.items() if draw(st.booleans())}
                    if keep:
                        content[(dx, dy)] = keep
        if corrupt and corrupted is None and content:
            coord = sorted(content)[0]
            attr = sorted(content[coord])[0]
            domain = SCHEMA.domain(attr)
            content[coord][attr] = domain[(domain.index(content[coord][attr]) + 1) % len(domain)]
            corrupted = i
        code = store_eaf(system, Patch.from_cells(2, 2, content, anchor=Anchor("g", ax, ay)))
        system.add_image(unit, ExtensionalImage(code))
    # frames: unanchored patches made of tokens of earlier names, so no cycles
    for i, u in enumerate(units[1:], start=1):
        if draw(st.booleans()):
            targets = draw(st.lists(st.sampled_from(units[:i]), min_size=1, max_size=2))
            frame = Patch.from_cells(2, 2, tokens={(k, 0): t for k, t in enumerate(targets)})
            system.add_image(u, ExtensionalImage(store_eaf(system, frame)))
    for i, (code, patch) in enumerate(system.memory.items()):
        if patch.anchor is not None:
            system.add_situation(f"s{i}", code)
    sids = sorted(system.situations)
    for a, b in zip(sids, sids[1:]):
        sa, sb = system.situations[a].anchor, system.situations[b].anchor
        try:
            add_link(system, a, b, (sb.x - sa.x, sb.y - sa.y))
        except ValueError:
            pass
    return system


def relabel(system: RepresentationalSystem, units: dict, situations: dict,
            links: dict | None = None) -> RepresentationalSystem:
    """Copy of ``system`` with unit, situation and link ids renamed."""
    from reprlogic.web import IntensionalImage, ObjectRecord

    links = links or {}
    other = RepresentationalSystem(system.window, system.name)
    if system.bound_universe is not None:
        other.bind(system.bound_universe)
    for code, patch in system.memory.items():
        tokens = {c: units[cell.token] for c, cell in patch.cells() if cell.token}
        renamed = Patch.from_cells(patch.width, patch.height, patch.content(), tokens, patch.anchor)
        assert store_eaf(other, renamed, system.labels.get(code)) == code
    for uid in system.units:
        unit = system.units[uid]
        other.add_unit(units[uid], unit.kind, unit.template, dict(unit.relation))
    for uid, images in system.semantics.items():
        for image in images:
            if isinstance(image, IntensionalImage):
                r = image.rule
                other.add_rule(units[uid], r.kind, r.params, r.anchor, image.alt, r.id)
            else:
                other.add_image(units[uid], image)
    for sid, sit in system.situations.items():
        other.add_situation(situations[sid], sit.code if sit.code is not None else sit.patch, sit.anchor)
    for lid, link in system.links.items():
        a, b = (situations[e] for e in link.endpoints)
        add_link(other, a, b, link.grounding if link.grounded else None, links.get(lid, lid))
    for uid, record in system.objects.items():
        other.objects[units[uid]] = ObjectRecord(
            units[uid], frozenset(situations[s] for s in record.situations)
        )
    return other
