import pytest
from hypothesis import given, strategies as st

from strategies import VARS, terms
from univgeom import fixtures as fx
from univgeom.errors import ParseError, SignatureError
from univgeom.models import RelationalStructure, diagram_formula_of, local_submodels
from univgeom.syntax import (
    App,
    AtomicFormula,
    Const,
    DiagramFormula,
    Signature,
    Var,
    VariableMap,
    enumerate_terms,
    eval_term,
    parse_atomic,
    parse_sentence,
    parse_term,
    serialize_term,
    substitute,
    validate_diagram_formula,
)

SIGNATURES = [fx.SEMILATTICE, fx.UNARY, fx.TWO_CONSTANTS, fx.GROUP, fx.GROUPOID]


def sig_and_term(depth=4):
    return st.sampled_from(SIGNATURES).flatmap(lambda s: st.tuples(st.just(s), terms(s, depth=depth)))


def test_parse_nested_meet():
    t = parse_term("meet(x,meet(y,x))", fx.SEMILATTICE, ["x", "y"])
    assert t == App("meet", (Var("x"), App("meet", (Var("y"), Var("x")))))
    assert t.variables() == {"x", "y"}
    assert t.depth() == 2


def test_parse_closed_constant():
    t = parse_term("e", fx.GROUP, [])
    assert t == Const("e")
    assert t.variables() == frozenset()


def test_parse_arity_mismatch():
    with pytest.raises((ParseError, SignatureError)):
        parse_term("mul(x)", fx.GROUP, ["x"])


def test_parse_rejects_undeclared_identifier():
    with pytest.raises((ParseError, SignatureError)):
        parse_term("meet(x,w)", fx.SEMILATTICE, ["x"])


def test_eval_examples(std):
    S2, Z2 = std["S2"], std["Z2"]
    t = parse_term("meet(x,meet(y,x))", fx.SEMILATTICE, ["x", "y"])
    assert eval_term(t, S2, {"x": 1, "y": 0}) == 0
    assert eval_term(Const("e"), Z2, {}) == 0
    for m in range(std["Z4"].size):
        assert eval_term(Var("x"), std["Z4"], {"x": m}) == m


@given(sig_and_term())
def test_serialize_parse_round_trip(pair):
    sig, t = pair
    assert parse_term(serialize_term(t), sig, VARS) == t


@pytest.mark.parametrize("sig", SIGNATURES, ids=lambda s: "+".join(s.symbols) or "empty")
def test_round_trip_exhaustive_shallow(sig):
    for t in enumerate_terms(sig, ["x", "y"], 2):
        assert parse_term(serialize_term(t), sig, ["x", "y"]) == t


FIXTURES = list(fx.standard().values())


@given(st.sampled_from(FIXTURES).flatmap(
    lambda B: st.tuples(st.just(B), terms(B.sig, depth=3), st.tuples(*[st.integers(0, B.size - 1)] * 3))))
def test_eval_is_compositional(case):
    B, t, values = case
    point = dict(zip(VARS, values))
    if isinstance(t, App):
        args = [eval_term(a, B, point) for a in t.args]
        assert eval_term(t, B, point) == B.apply(t.fn, args)
    elif isinstance(t, Var):
        assert eval_term(t, B, point) == point[t.name]
    else:
        assert eval_term(t, B, point) == B.constant(t.name)


def test_enumerate_terms_counts():
    sig = Signature((("m", 2), ("f", 1)), ())
    assert len(enumerate_terms(sig, ["x", "y"], 3)) == 5552
    assert len(enumerate_terms(Signature((("f", 1), ("g", 1)), ("c",)), ["x", "y", "z"], 2)) == 4 + 8 + 16
    terms3 = enumerate_terms(sig, ["x", "y"], 3)
    assert len(set(terms3)) == len(terms3)
    assert max(t.depth() for t in terms3) == 3


def test_sentence_parse_and_dual():
    s = parse_sentence("forall x. mul(x,x) = e", fx.GROUP)
    assert s.is_universal()
    d = s.dual()
    assert d.is_existential()
    assert d.dual() == s


def test_horn_parts():
    q = parse_sentence("forall x. mul(x,x) = e -> x = e", fx.GROUP)
    premises, conclusion = q.horn_parts()
    assert [str(p) for p in premises] == ["mul(x,x) = e"]
    assert str(conclusion) == "x = e"


# diagram formulas


def s2_diagram():
    S2 = fx.semilattice2()
    return diagram_formula_of(RelationalStructure.induced(S2, S2.sig, [0, 1]), ["u", "v"])


def test_substitute_identity():
    phi = s2_diagram()
    assert substitute(phi, VariableMap.identity(phi.variables)) == phi.conjuncts


def test_substitute_collapse_keeps_self_inequation():
    phi = s2_diagram()
    out = substitute(phi, {"u": "w", "v": "w"})
    assert AtomicFormula(Var("w"), Var("w"), True) in out


def test_substitute_renames_function_entry():
    phi = DiagramFormula(fx.UNARY, ("x", "y"), frozenset({parse_atomic("f(x) = y", fx.UNARY, ["x", "y"])}))
    out = substitute(phi, {"x": "u", "y": "v"})
    assert parse_atomic("f(u) = v", fx.UNARY, ["u", "v"]) in out


def test_validate_s2_diagram():
    phi = s2_diagram()
    positives = [c for c in phi.conjuncts if not c.negated and isinstance(c.left, App)]
    assert len(positives) == 4
    assert AtomicFormula(Var("u"), Var("v"), True) in phi.conjuncts
    assert validate_diagram_formula(phi).valid


def test_validate_missing_entry():
    phi = s2_diagram()
    drop = parse_atomic("meet(u,v) = u", fx.SEMILATTICE, ["u", "v"])
    broken = DiagramFormula(phi.reduct, phi.variables, phi.conjuncts - {drop})
    report = validate_diagram_formula(broken)
    assert not report.valid
    assert any("missing F-entry" in v for v in report.violations)


def test_validate_functional_clash():
    conj = frozenset(parse_atomic(s, fx.UNARY, ["u", "v"]) for s in ["f(u) = u", "f(u) = v", "u != v"])
    report = validate_diagram_formula(DiagramFormula(fx.UNARY, ("u", "v"), conj))
    assert not report.valid
    assert any("clash" in v for v in report.violations)


@pytest.mark.parametrize("name", sorted(fx.standard()))
def test_validator_accepts_every_local_diagram(name):
    M = fx.standard()[name]
    for reduct in M.sig.reducts():
        for size in range(1, min(M.size, 3) + 1):
            for N in local_submodels(M, reduct, size):
                phi = diagram_formula_of(N)
                assert validate_diagram_formula(phi).valid
                for c in phi.conjuncts:
                    assert not validate_diagram_formula(DiagramFormula(phi.reduct, phi.variables, phi.conjuncts - {c})).valid
