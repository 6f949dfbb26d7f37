import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reprlogic.extension import IncoherenceReport
from reprlogic.logic.properties import (
    Coherent,
    PropertyError,
    PropertyReport,
    check_coherence,
    check_completeness,
    check_faithfulness,
    check_s_completeness,
)
from reprlogic.presence import Anchor, Patch, WindowSpec
from reprlogic.universe import AttributeSchema, Universe, World, build_universe, window_regions
from reprlogic.web import ExtensionalImage, RepresentationalSystem, add_link, store_eaf
from strategies import SCHEMA, consistent_systems, relabel

CONSISTENT = ["london8", "circle16", "dna"]


def unbound():
    return RepresentationalSystem(WindowSpec(2, 2, SCHEMA))


def covered_regions(system, universe):
    """Oracle: window-aligned regions matched by the merge of all anchored memories."""
    merged = {}
    for _, patch in system.memory.items():
        if patch.anchor is None:
            continue
        a = patch.anchor
        for (x, y), cell in patch.cells():
            for attr, value in cell.content:
                merged.setdefault((a.world, x + a.x, y + a.y), {})[attr] = value
    out = {}
    w = system.window
    for wid, world in universe.worlds.items():
        for region in window_regions(world, w.width, w.height):
            out[f"{wid}:{region}"] = all(
                merged.get((wid,) + c, {}) == world.assignment(c) for c in region.cells()
            )
    return out


def test_report_needs_witness_when_failing():
    with pytest.raises(PropertyError):
        PropertyReport("completeness", False)


def test_empty_universe_is_vacuously_complete(scenario):
    system = scenario("london8").system
    empty = Universe.empty(system.window.schema)
    assert check_completeness(system, empty).verdict
    assert check_s_completeness(system, empty).verdict
    assert check_faithfulness(unbound(), Universe.empty(SCHEMA)).verdict


def test_london_complete_and_missing_tower(scenario):
    system = scenario("london8").system
    universe = system.bound_universe
    assert check_completeness(system).verdict
    oracle = covered_regions(system, universe)
    assert all(oracle.values()) and len(oracle) == 8

    code = system.situations["Tower"].code
    broken = system.without_code(code)
    report = check_completeness(broken)
    assert not report.verdict
    assert [w.fragment for w in report.witnesses] == ["london:24,0,8,8"]
    missing = sorted(k for k, ok in covered_regions(broken, universe).items() if not ok)
    assert missing == ["london:24,0,8,8"]
    assert report.checked == 8


def test_circle_needs_its_rule(scenario):
    system = scenario("circle16").system
    assert check_completeness(system).verdict
    assert check_s_completeness(system).verdict
    bare = system.without_rules("Circle")
    report = check_s_completeness(bare)
    assert not report.verdict
    assert [w.fragment for w in report.witnesses] == ["circle:0,0,16,16"]


def test_stored_but_unnamed_content_is_not_s_complete():
    universe = build_universe(SCHEMA, [World("g", 2, 2, {(0, 0): {"color": "red"}})])
    system = RepresentationalSystem(WindowSpec(2, 2, SCHEMA)).bind(universe)
    store_eaf(system, Patch.from_cells(2, 2, {(0, 0): {"color": "red"}}, anchor=Anchor("g", 0, 0)))
    assert check_completeness(system).verdict
    report = check_s_completeness(system)
    assert not report.verdict and report.kinds() == ["missing-region"]


@pytest.mark.parametrize("name", CONSISTENT)
def test_consistent_fixtures_are_faithful(scenario, name):
    system = scenario(name).system
    report = check_faithfulness(system)
    assert report.verdict, [str(w) for w in report.witnesses]


def test_notebook_blue_memory_is_the_error(scenario):
    system = scenario("notebook").system
    report = check_faithfulness(system)
    assert [(w.kind, w.fragment) for w in report.witnesses] == [("erroneous-datum", "code:1")]
    conflict = check_coherence(system, "desk")
    assert "code:1" in conflict.cause


def test_pyramid_is_one_erroneous_datum(scenario):
    report = check_faithfulness(scenario("tower_pyramid").system)
    assert not report.verdict
    (witness,) = report.witnesses
    assert (witness.kind, witness.fragment) == ("erroneous-datum", "situation:Tower")
    assert "landmark=pyramid" in witness.detail
    assert "situation:Tower" in witness.sources


def test_floods_law_domain_is_wrong(scenario):
    report = check_faithfulness(scenario("floods").system)
    assert report.kinds() == ["wrong-law-domain"]
    assert "whitemountain" in report.witnesses[0].detail


def test_ill_naming_and_misaligned_link():
    ground = {(x, y): {"color": "red" if x < 2 else "blue"} for x in range(4) for y in range(2)}
    universe = build_universe(SCHEMA, [World("g", 4, 2, ground)])
    system = RepresentationalSystem(WindowSpec(2, 2, SCHEMA)).bind(universe)
    system.add_unit("n")
    left = store_eaf(system, Patch.from_cells(2, 2, {(0, 0): {"color": "red"}}, anchor=Anchor("g", 0, 0)))
    right = store_eaf(system, Patch.from_cells(2, 2, {(0, 0): {"color": "blue"}}, anchor=Anchor("g", 2, 0)))
    system.add_image("n", ExtensionalImage(left))
    system.add_image("n", ExtensionalImage(right))
    system.add_situation("a", Patch.blank(2, 2, Anchor("g", 0, 0)))
    system.add_situation("b", Patch.blank(2, 2, Anchor("g", 2, 0)))
    add_link(system, "a", "b", (1, 0), "bad")
    report = check_faithfulness(system)
    assert sorted(report.kinds()) == ["ill-naming", "wrong-predication"]
    by_kind = {w.kind: w for w in report.witnesses}
    assert by_kind["ill-naming"].fragment == "unit:n"
    assert by_kind["wrong-predication"].fragment == "link:bad"


def test_unanchored_content_is_skipped():
    universe = build_universe(SCHEMA, [World("g", 2, 2, {})])
    system = RepresentationalSystem(WindowSpec(2, 2, SCHEMA)).bind(universe)
    system.add_unit("free")
    code = store_eaf(system, Patch.from_cells(2, 2, {(0, 0): {"color": "red"}}))
    system.add_image("free", ExtensionalImage(code))
    system.add_rule("free", "fill", {"attr": "color", "value": "blue"})
    report = check_faithfulness(system)
    assert report.verdict
    assert report.skipped == (f"code:{code}", "rule:r0")


def test_schema_mismatch_and_missing_universe_raise(scenario):
    system = scenario("london8").system
    other = Universe.empty(AttributeSchema.of({"tone": ["high", "low"]}))
    with pytest.raises(PropertyError, match="schema mismatch"):
        check_completeness(system, other)
    with pytest.raises(PropertyError, match="not bound"):
        check_faithfulness(unbound())


def test_coherence_on_fixtures(scenario):
    assert isinstance(check_coherence(scenario("london8").system, "London"), Coherent)
    notebook = check_coherence(scenario("notebook").system, "desk")
    assert isinstance(notebook, IncoherenceReport) and notebook.kind == "extrinsic"
    liar = check_coherence(scenario("liar").system, "L")
    assert (liar.kind, liar.reason, liar.cycle) == ("intrinsic", "cycle", ("L",))


def fragments(system):
    return sorted(system.units) + sorted(system.situations)


@settings(max_examples=150)
@given(consistent_systems())
def test_faithful_systems_have_no_extrinsic_conflict(system):
    assert check_faithfulness(system).verdict
    for fragment in fragments(system):
        result = check_coherence(system, fragment)
        assert not (isinstance(result, IncoherenceReport) and result.kind == "extrinsic")


@settings(max_examples=150)
@given(consistent_systems(corrupt=True))
def test_extrinsic_causes_are_flagged_sources(system):
    report = check_faithfulness(system)
    flagged = {s for w in report.witnesses for s in w.sources}
    for fragment in fragments(system):
        result = check_coherence(system, fragment)
        if isinstance(result, IncoherenceReport) and result.kind == "extrinsic":
            assert not report.verdict
            assert flagged.intersection(result.cause)


@settings(max_examples=100)
@given(consistent_systems(corrupt=True), st.randoms(use_true_random=False))
def test_verdicts_ignore_id_choice(system, rng):
    unit_ids = sorted(system.units)
    sit_ids = sorted(system.situations)
    shuffled_units = rng.sample(unit_ids, len(unit_ids))
    shuffled_sits = rng.sample(sit_ids, len(sit_ids))
    units = {u: f"name_{v}" for u, v in zip(unit_ids, shuffled_units)}
    sits = {s: f"place_{t}" for s, t in zip(sit_ids, shuffled_sits)}
    links = {lid: f"X{lid}" for lid in system.links}
    other = relabel(system, units, sits, links)
    for check in (check_faithfulness, check_completeness, check_s_completeness):
        a, b = check(system), check(other)
        assert a.verdict == b.verdict
        assert sorted(a.kinds()) == sorted(b.kinds())
    for u in unit_ids:
        a, b = check_coherence(system, u), check_coherence(other, units[u])
        assert type(a) is type(b)
        if isinstance(a, IncoherenceReport):
            assert (a.kind, a.reason) == (b.kind, b.reason)
