import pytest
from hypothesis import given, settings, strategies as st

from strategies import terms
from univgeom import fixtures as fx
from univgeom import oracles
from univgeom._config import universe_bound
from univgeom.presentations import (
    CongruentClosure,
    Presentation,
    congruent_closure_query,
    realize_presentation_in,
    table_presentation,
)
from univgeom.syntax import AtomicFormula, Signature, eval_term, parse_atomic

F = Signature((("f", 1),), ())
FGC = Signature((("f", 1), ("g", 1)), ("c",))
MF = Signature((("m", 2), ("f", 1)), ())


def eq(text, sig, variables=("x", "y")):
    return parse_atomic(text, sig, variables)


def test_closure_examples():
    P = Presentation(F, ("x", "y"), (eq("x = y", F),))
    assert congruent_closure_query(P, eq("f(f(x)) = f(f(y))", F))
    assert not congruent_closure_query(P, eq("x = f(x)", F))
    assert congruent_closure_query(P, eq("f(x) = f(x)", F))


def test_closure_rejects_inequation_and_low_bound():
    P = Presentation(F, ("x", "y"), (eq("f(x) = y", F),))
    with pytest.raises(ValueError):
        congruent_closure_query(P, eq("x != y", F))
    with pytest.raises(ValueError):
        congruent_closure_query(P, eq("f(f(x)) = y", F), depth_bound=1)


def test_closure_downward_merge():
    # f(x) = x makes f(f(x)) = x by congruence and transitivity
    P = Presentation(F, ("x",), (eq("f(x) = x", F, ("x",)),))
    assert congruent_closure_query(P, eq("f(f(f(x))) = x", F, ("x",)))


def presentations(sig, variables):
    rel = st.builds(AtomicFormula, terms(sig, variables, 2), terms(sig, variables, 2))
    return st.lists(rel, min_size=0, max_size=3).map(lambda rs: Presentation(sig, variables, tuple(rs)))


SETUPS = [(FGC, ("x", "y", "z")), (MF, ("x", "y"))]
UNIVERSES = {sig: oracles.saturation_universe(sig, vs, 3) for sig, vs in SETUPS}


# each example saturates a universe of thousands of terms
@settings(max_examples=25)
@given(st.sampled_from(SETUPS).flatmap(lambda s: st.tuples(
    presentations(*s), terms(s[0], s[1], 3), terms(s[0], s[1], 3))))
def test_closure_agrees_with_saturation(case):
    P, t, u = case
    labels = oracles.saturate(P.relations, UNIVERSES[P.sig])
    assert congruent_closure_query(P, AtomicFormula(t, u)) == (labels[t] == labels[u])


@given(st.sampled_from(SETUPS).flatmap(lambda s: st.tuples(
    presentations(*s), presentations(*s), terms(s[0], s[1], 2), terms(s[0], s[1], 2))))
def test_closure_is_monotone(case):
    P, extra, t, u = case
    bigger = Presentation(P.sig, P.variables, P.relations + extra.relations)
    q = AtomicFormula(t, u)
    if congruent_closure_query(P, q):
        assert congruent_closure_query(bigger, q)


@settings(max_examples=30)
@given(st.sampled_from(SETUPS).flatmap(lambda s: st.tuples(
    presentations(*s), terms(s[0], s[1], 2), terms(s[0], s[1], 2))))
def test_closure_is_stable_under_larger_universes(case):
    P, t, u = case
    q = AtomicFormula(t, u)
    base = congruent_closure_query(P, q)
    with universe_bound(6000):
        assert congruent_closure_query(P, q, depth_bound=3, extend=True) == base


@given(st.sampled_from([(fx.UNARY, ("x", "y")), (fx.SEMILATTICE, ("x", "y")), (fx.GROUP, ("x", "y"))]).flatmap(
    lambda s: st.tuples(presentations(*s), terms(s[0], s[1], 2), terms(s[0], s[1], 2))))
def test_derivable_equations_hold_in_every_realization(case):
    P, t, u = case
    q = AtomicFormula(t, u)
    if not congruent_closure_query(P, q):
        return
    for B in fx.standard().values():
        if B.sig != P.sig:
            continue
        for point in realize_presentation_in(P, B):
            assert eval_term(t, B, point) == eval_term(u, B, point)


def test_closure_classes_of_table_presentation():
    cc = CongruentClosure.of(table_presentation(fx.cyclic_group(2)))
    assert cc.equivalent(parse_atomic("mul(x1,x1) = e", fx.GROUP, ["x0", "x1"]).left,
                         parse_atomic("mul(x1,x1) = e", fx.GROUP, ["x0", "x1"]).right)


def test_table_presentation_z2():
    P = table_presentation(fx.cyclic_group(2))
    assert P.variables == ("x0", "x1")
    rels = {str(r) for r in P.relations}
    assert {"mul(x0,x0) = x0", "mul(x0,x1) = x1", "mul(x1,x1) = x0", "inv(x1) = x1", "e = x0"} <= rels
    assert len(rels) == 4 + 2 + 1


def test_table_presentation_small():
    E = fx.standard()["E_group"]
    P = table_presentation(E)
    assert P.variables == ("x0",)
    assert len(P.relations) == 3
    assert len(table_presentation(fx.semilattice2()).relations) == 4


def test_table_presentation_needs_generators():
    with pytest.raises(ValueError):
        table_presentation(fx.cyclic_group(4), [2])


def test_realize_table_presentation_z2():
    # x1 -> 0 also satisfies every table relation: the assignments are Hom(Z2, Z2)
    got = realize_presentation_in(table_presentation(fx.cyclic_group(2)), fx.cyclic_group(2))
    assert got == [{"x0": 0, "x1": 0}, {"x0": 0, "x1": 1}]


def test_realize_unconstrained_and_unsatisfiable():
    B = fx.cyclic_group(3)
    assert len(realize_presentation_in(Presentation(fx.GROUP, ("x", "y"), ()), B)) == 9
    P = Presentation(fx.UNARY, ("x",), (eq("x = f(x)", fx.UNARY, ("x",)),))
    assert realize_presentation_in(P, fx.negation2()) == []
