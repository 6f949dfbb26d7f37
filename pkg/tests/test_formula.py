import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import oracle_valid, truth_mask, valuation_of
from reprlogic.logic.formula import (
    SCHEMAS,
    And,
    FormulaError,
    Implies,
    Not,
    Or,
    Var,
    check_generalized_law,
    check_law_of_inference,
    check_particular_inference,
    depth,
    eval_formula,
    match_schema,
    parse,
    parse_argument,
    schema,
    substitute,
    valuations,
    variables,
)
from strategies import formulas

A, B, C = Var("A"), Var("B"), Var("C")


def to_tuple(f):
    if isinstance(f, Var):
        return ("var", f.name)
    if isinstance(f, Not):
        return ("not", to_tuple(f.arg))
    op = {And: "and", Or: "or", Implies: "imp"}[type(f)]
    return (op, to_tuple(f.left), to_tuple(f.right))


def test_parse_precedence_and_associativity():
    assert parse("A -> B -> C") == Implies(A, Implies(B, C))
    assert parse("~A & B | C") == Or(And(Not(A), B), C)
    assert parse("!(A | B)") == Not(Or(A, B))
    assert parse("it-rains -> ground-wet") == Implies(Var("it-rains"), Var("ground-wet"))
    for bad in ("", "A &", "(A", "A B", "A -> ", "&A"):
        with pytest.raises(FormulaError):
            parse(bad)


@settings(max_examples=300)
@given(formulas())
def test_printing_round_trips(f):
    assert parse(str(f)) == f


def test_parse_argument():
    premises, conclusion = parse_argument("A -> B, A |- B")
    assert premises == [Implies(A, B), A] and conclusion == B
    assert parse_argument("|- A | ~A") == ([], Or(A, Not(A)))
    with pytest.raises(FormulaError):
        parse_argument("A, B")


def test_eval_and_missing_variable():
    assert eval_formula(A, {"A": True})
    assert not any(eval_formula(And(A, Not(A)), v) for v in valuations(["A"]))
    with pytest.raises(FormulaError):
        eval_formula(And(A, B), {"A": True})


def test_valuations_are_lexicographic():
    assert [tuple(v.values()) for v in valuations(["A", "B"])] == [
        (False, False), (False, True), (True, False), (True, True)
    ]


def test_variables_and_depth():
    f = parse("(B -> A) & ~C")
    assert variables(f) == ["B", "A", "C"]
    assert depth(f) == 2
    assert substitute(f, {"A": C}) == parse("(B -> C) & ~C")


def test_documented_verdicts():
    assert check_law_of_inference([Implies(A, B), A], B).valid
    bad = check_law_of_inference([Implies(A, B), B], A)
    assert not bad.valid and bad.counterexample == {"A": False, "B": True}
    assert check_law_of_inference([A], A).valid


def test_declared_order_controls_counterexample():
    premises, conclusion = parse_argument("A | B |- A & B")
    assert check_law_of_inference(premises, conclusion).counterexample == {"A": False, "B": True}
    assert check_law_of_inference(premises, conclusion, ["B", "A"]).counterexample == {"B": False, "A": True}
    with pytest.raises(FormulaError):
        check_law_of_inference(premises, conclusion, ["A"])


def test_particular_inference_in_a_world():
    premises, conclusion = parse_argument("rain -> flood, rain |- flood")
    novel = {"rain": True, "flood": True}
    assert check_particular_inference(premises, conclusion, novel)
    assert not check_particular_inference(premises, conclusion, {"rain": True, "flood": False})


@settings(max_examples=300)
@given(st.lists(formulas(), max_size=3), formulas())
def test_agrees_with_bitmask_oracle(premises, conclusion):
    names = ["A", "B", "C"]
    verdict = check_law_of_inference(premises, conclusion, names)
    ok, index = oracle_valid([truth_mask(to_tuple(p), names) for p in premises],
                             truth_mask(to_tuple(conclusion), names), 3)
    assert verdict.valid == ok
    if not ok:
        assert verdict.counterexample == valuation_of(index, names)


@settings(max_examples=200)
@given(st.lists(formulas(), max_size=3), formulas(), formulas(), st.integers(2, 5))
def test_monotonicity_and_worker_independence(premises, conclusion, extra, workers):
    names = ["A", "B", "C"]
    base = check_law_of_inference(premises, conclusion, names)
    assert check_law_of_inference(premises, conclusion, names, workers=workers) == base
    if base.valid:
        assert check_law_of_inference(premises + [extra], conclusion, names).valid


@settings(max_examples=200)
@given(formulas(), st.sampled_from(["A", "B", "C"]))
def test_particular_inference_matches_eval_formula(f, name):
    premises = [f, Var(name)]
    for v in valuations(["A", "B", "C"]):
        expected = all(eval_formula(p, v) for p in premises) and eval_formula(f, v)
        assert check_particular_inference(premises, f, v) == expected


@pytest.mark.parametrize("name", sorted(SCHEMAS))
def test_schema_verdicts(name):
    premises, conclusion = schema(name)
    verdict = check_generalized_law(premises, conclusion).verdict
    fallacy = name in ("affirming-the-consequent", "denying-the-antecedent")
    assert verdict.valid is not fallacy


@settings(max_examples=150)
@given(st.sampled_from(sorted(SCHEMAS)), formulas(max_leaves=4), formulas(max_leaves=4),
       formulas(max_leaves=4))
def test_substitution_instances_keep_validity(name, f, g, h):
    premises, conclusion = schema(name)
    mapping = dict(zip(["p", "q", "r"], [f, g, h]))
    result = check_generalized_law(premises, conclusion, [mapping])
    if result.valid:
        assert all(i.valid for i in result.instances)
    else:
        assert result.counterexample is not None


def test_match_schema_on_wet_ground_argument():
    concrete = parse_argument("it-rains -> ground-wet, it-rains |- ground-wet")
    binding = match_schema(concrete, schema("modus-ponens"))
    assert binding == {"p": Var("it-rains"), "q": Var("ground-wet")}
    mp = schema("modus-ponens")
    assert match_schema(mp, mp) == {"p": Var("p"), "q": Var("q")}
    assert match_schema(parse_argument("A -> B, A |- A"), mp) is None


@settings(max_examples=200)
@given(st.sampled_from(sorted(SCHEMAS)), formulas(max_leaves=4), formulas(max_leaves=4),
       formulas(max_leaves=4))
def test_match_schema_reproduces_instance(name, f, g, h):
    premises, conclusion = schema(name)
    mapping = dict(zip(["p", "q", "r"], [f, g, h]))
    concrete = ([substitute(p, mapping) for p in premises], substitute(conclusion, mapping))
    binding = match_schema(concrete, (premises, conclusion))
    assert binding is not None
    assert [substitute(p, binding) for p in premises] == concrete[0]
    assert substitute(conclusion, binding) == concrete[1]
