import pytest
from hypothesis import given
from hypothesis import strategies as st

from reprlogic.logic.connectives import ContentError, conjoin, disjoin, negate, present
from reprlogic.logic.formula import FormulaError
from reprlogic.presence import Anchor, ConflictReport, Display, Patch
from reprlogic.web import Atom

P, Q = Atom("p"), Atom("q")
VALUATIONS = [{"p": a, "q": b} for a in (False, True) for b in (False, True)]


def test_conjunction_of_p_with_itself_is_p():
    for v in VALUATIONS:
        assert present(None, conjoin(P, P), v) == v["p"]


@given(st.booleans(), st.booleans())
def test_leaves_follow_truth_tables(a, b):
    v = {"p": a, "q": b}
    assert present(None, conjoin(P, Q), v) == (a and b)
    assert present(None, disjoin([P, Q]), v) == (a or b)
    assert present(None, negate(P), v) == (not a)
    assert present(None, negate(negate(P)), v) == a
    assert not present(None, conjoin(P, negate(P)), v)
    assert present(None, disjoin([P]), v) == a


def test_empty_disjunction_rejected():
    with pytest.raises(ContentError):
        disjoin([])


def test_missing_variable_raises():
    with pytest.raises(FormulaError):
        present(None, P, {"q": True})


def test_oversized_conjunction_is_only_virtual():
    left = Patch.from_cells(2, 2, {(0, 0): {"color": "red"}}, anchor=Anchor("real", 0, 0))
    right = Patch.from_cells(2, 2, {(1, 1): {"color": "blue"}}, anchor=Anchor("real", 2, 2))
    both = conjoin(left, right)
    assert both.exceeds_window(2, 2)
    display = both.co_display()
    assert isinstance(display, Display)
    assert display.bounds("real").width == 4


def test_red_or_blue_notebook_splits_worlds(scenario):
    s = scenario("notebook")
    red, blue = s.patches["seen_red"], s.patches["seen_blue"]
    assert isinstance(conjoin(red, blue).co_display(), ConflictReport)
    display = disjoin([red, blue]).co_display()
    assert display.layers == ("real/alt0", "real/alt1")
    assert display.cells[("real/alt0", 0, 0)].as_dict() == {"color": "red"}
    assert display.cells[("real/alt1", 0, 0)].as_dict() == {"color": "blue"}


def test_negated_blue_notebook_holds_in_red_world(scenario):
    s = scenario("notebook")
    system = s.system
    red, blue = s.patches["seen_red"], s.patches["seen_blue"]
    assert present(system, red, "real")
    assert not present(system, blue, "real")
    assert present(system, negate(blue), "real")
    assert present(system, disjoin([red, blue]), "real")
    with pytest.raises(ContentError):
        present(system, red, "elsewhere")
