import itertools

import pytest
from hypothesis import given, settings, strategies as st

from strategies import terms
from univgeom import fixtures as fx
from univgeom import oracles
from univgeom.algebra import CoefficientStructure, enumerate_homomorphisms
from univgeom.errors import BoundExceeded, EmptyVarietyError, SignatureError
from univgeom.geometry import (
    AlgebraicSet,
    ClosedSet,
    EquationSystem,
    closed_intersection,
    closed_union,
    coordinate_algebra,
    decompose,
    full_space,
    is_irreducible,
    noetherian_chain_probe,
    radical_member,
    solve,
    trace_subalgebra,
)
from univgeom.models import discriminates, separates
from univgeom.syntax import AtomicFormula, Const, Var, parse_atomic
from univgeom._config import universe_bound

XY = ("x", "y")


def system(B, texts, variables=XY, coefficients=None):
    lang = coefficients.sig if coefficients else B.sig
    return EquationSystem(B.sig, variables, tuple(parse_atomic(t, lang, variables) for t in texts), coefficients)


@pytest.fixture
def meet_set():
    S2 = fx.semilattice2()
    return solve(system(S2, ["meet(x,y) = x"]), S2)


def test_solve_meet(meet_set):
    assert meet_set.points == ((0, 0), (0, 1), (1, 1))
    assert meet_set.recheck()


def test_solve_empty_system_is_whole_line(std):
    for B in std.values():
        assert full_space(B, ["x"]).points == tuple((a,) for a in range(B.size))


def test_solve_no_fixed_point():
    N2 = fx.negation2()
    assert solve(system(N2, ["x = f(x)"], ("x",)), N2).is_empty()


def test_solve_checks_language_and_bound():
    with pytest.raises(SignatureError):
        solve(system(fx.semilattice2(), ["meet(x,y) = x"]), fx.negation2())
    with universe_bound(8), pytest.raises(BoundExceeded):
        solve(EquationSystem(fx.GROUP, ("x", "y")), fx.cyclic_group(3))


def test_radical_examples(meet_set):
    S2 = meet_set.algebra
    q = parse_atomic("meet(x,y) = meet(x,meet(y,y))", S2.sig, XY)
    assert radical_member(meet_set, q)
    assert not radical_member(meet_set, parse_atomic("x = y", S2.sig, XY))
    assert radical_member(meet_set, parse_atomic("x != y", S2.sig, XY)) is False


def test_radical_of_empty_set_is_everything():
    N2 = fx.negation2()
    Y = solve(system(N2, ["x = f(x)"], ("x",)), N2)
    assert radical_member(Y, parse_atomic("x = f(f(f(x)))", N2.sig, ["x"]))
    with pytest.raises(EmptyVarietyError):
        trace_subalgebra(Y)
    with pytest.raises(EmptyVarietyError):
        is_irreducible(Y)


def test_trace_examples(meet_set):
    T = trace_subalgebra(meet_set)
    assert T.functions == [(0, 0, 1), (0, 1, 1)]
    assert len(trace_subalgebra(full_space(fx.semilattice2(), ["x"]))) == 1
    T = trace_subalgebra(full_space(fx.two_constants(), ["x"]))
    assert sorted(T.functions) == [(0, 0), (0, 1), (1, 1)]


def test_coordinate_algebra_of_meet_set_is_s2(meet_set):
    from univgeom.algebra import find_isomorphism

    G, gens = coordinate_algebra(meet_set)
    assert G.size == 2
    assert G.apply("meet", gens) == gens[0]
    assert find_isomorphism(G, fx.semilattice2()) is not None


def test_coordinate_algebra_of_point_is_generated_subalgebra():
    from univgeom.algebra import generated_subalgebra

    Z4 = fx.cyclic_group(4)
    Y = AlgebraicSet(Z4, ("x",), ((2,),))
    G, _ = coordinate_algebra(Y)
    assert G.size == len(generated_subalgebra(Z4, [2]).elements)


def test_irreducible_examples(meet_set):
    r = is_irreducible(meet_set)
    assert r.irreducible and r.generic_point == (0, 1)
    C01 = fx.two_constants()
    r = is_irreducible(full_space(C01, ["x"]))
    assert not r.irreducible
    assert sorted(pts for _, pts in r.cover) == [((0,),), ((1,),)]
    assert is_irreducible(AlgebraicSet(C01, ("x",), ((1,),))).irreducible


def test_decompose_examples(meet_set):
    C01 = fx.two_constants()
    assert [c.points for c in decompose(full_space(C01, ["x"]))] == [((0,),), ((1,),)]
    assert decompose(meet_set) == [meet_set]
    comps = decompose(full_space(C01, XY))
    assert [c.points for c in comps] == [((a, b),) for a in range(2) for b in range(2)]
    assert all(c.recheck() for c in comps)
    with pytest.raises(ValueError):
        decompose(meet_set, "sideways")


def test_closed_set_operations(meet_set):
    S2 = meet_set.algebra
    empty = solve(system(S2, ["meet(x,y) = x", "x = y", "meet(x,y) = y"]), S2)
    Y = ClosedSet.of(meet_set)
    assert closed_union(Y, ClosedSet(S2, XY)).points == meet_set.points
    assert closed_union(Y, Y) == Y
    S1, S2_ = system(S2, ["meet(x,y) = x"]), system(S2, ["meet(x,y) = y"])
    a, b = ClosedSet.of(solve(S1, S2)), ClosedSet.of(solve(S2_, S2))
    both = solve(S1.extended(S2_.equations), S2)
    assert closed_intersection(a, b).points == both.points == ((0, 0), (1, 1))
    assert empty.points == ((0, 0), (1, 1))
    with pytest.raises(ValueError):
        closed_union(Y, ClosedSet.of(full_space(S2, ["x"])))


def test_closed_union_is_antichain():
    C01 = fx.two_constants()
    line = full_space(C01, ["x"])
    zero = AlgebraicSet(C01, ("x",), ((0,),))
    assert ClosedSet.of(line, zero).components == (line,)


def test_noetherian_probe():
    S2 = fx.semilattice2()
    s1 = system(S2, ["x = x"])
    s2 = s1.extended([parse_atomic("meet(x,y) = x", S2.sig, XY)])
    s3 = s2.extended([parse_atomic("meet(y,x) = x", S2.sig, XY)])
    assert noetherian_chain_probe(S2, [s1, s1, s1]) == 1
    assert noetherian_chain_probe(S2, [s1, s2]) == 2
    assert noetherian_chain_probe(S2, [s2, s3]) == 1
    with pytest.raises(ValueError):
        noetherian_chain_probe(S2, [])


# properties over the geometry fixtures

GEOMETRY = [fx.standard()[n] for n in ("S2", "N2", "C01", "Z2", "Z3", "V4")]


def random_systems(B, variables=XY):
    eq = st.builds(AtomicFormula, terms(B.sig, variables, 2), terms(B.sig, variables, 2))
    return st.lists(eq, max_size=4).map(lambda eqs: EquationSystem(B.sig, variables, tuple(eqs)))


cases = st.sampled_from(GEOMETRY).flatmap(lambda B: st.tuples(st.just(B), random_systems(B)))


@given(cases)
def test_solve_matches_brute_force(case):
    B, S = case
    assert list(solve(S, B).points) == oracles.solve_points(S.equations, S.variables, B)


@given(cases.flatmap(lambda c: st.tuples(st.just(c), terms(c[0].sig, XY, 2), terms(c[0].sig, XY, 2))))
def test_radical_equations_do_not_change_solutions(case):
    (B, S), t, u = case
    Y = solve(S, B)
    q = AtomicFormula(t, u)
    member = radical_member(Y, q)
    assert member == radical_member(Y, q, "points")
    if member:
        assert solve(S.extended([q]), B).points == Y.points


@settings(max_examples=60)
@given(cases)
def test_coordinate_algebra_is_separated_and_discrimination_is_irreducibility(case):
    B, S = case
    Y = solve(S, B)
    if Y.is_empty():
        return
    G, gens = coordinate_algebra(Y)
    assert separates([B], G)[0]
    assert bool(is_irreducible(Y)) == discriminates([B], G)[0]
    assert bool(is_irreducible(Y)) == oracles.irreducible_by_points(B, Y.points)
    images = sorted({tuple(h.map[g] for g in gens) for h in enumerate_homomorphisms(G, B)})
    assert images == list(Y.points)


@settings(max_examples=60)
@given(cases)
def test_decomposition_is_a_canonical_irreducible_cover(case):
    B, S = case
    Y = solve(S, B)
    comps = decompose(Y)
    assert [c.points for c in comps] == [c.points for c in decompose(Y, "reverse")]
    assert set().union(*(c.point_set for c in comps)) == Y.point_set
    for a, b in itertools.permutations(comps, 2):
        assert not a.point_set <= b.point_set
    for c in comps:
        assert is_irreducible(c) and c.recheck()


# equations with coefficients: Z4 as a Z2-algebra through 0 -> 0, 1 -> 2

Z4_OVER_Z2 = CoefficientStructure(fx.cyclic_group(2), fx.cyclic_group(4), (0, 2))


def test_coefficient_system_needs_coefficient_algebra():
    S = system(fx.cyclic_group(4), ["mul(x,x) = c_1"], ("x",), Z4_OVER_Z2)
    assert solve(S, Z4_OVER_Z2).points == ((1,), (3,))
    with pytest.raises(SignatureError):
        solve(S, fx.cyclic_group(4))
    with pytest.raises(SignatureError):
        solve(S, CoefficientStructure(fx.standard()["E_group"], fx.klein_group(), (0,)))


def coefficient_systems():
    lang = Z4_OVER_Z2.sig
    eq = st.builds(AtomicFormula, terms(lang, XY, 2), terms(lang, XY, 2))
    return st.lists(eq, max_size=3).map(lambda eqs: EquationSystem(fx.GROUP, XY, tuple(eqs), Z4_OVER_Z2))


@settings(max_examples=60)
@given(coefficient_systems())
def test_coefficient_geometry(S):
    Y = solve(S, Z4_OVER_Z2)
    B = Z4_OVER_Z2.expand()
    assert list(Y.points) == oracles.solve_points(S.equations, S.variables, B)
    if Y.is_empty():
        return
    G, gens = coordinate_algebra(Y)
    # coordinate algebra carries the coefficient constants, so every homomorphism fixes them
    for c in Z4_OVER_Z2.names:
        assert G.constant(c) == trace_subalgebra(Y).trace(Const(c))
    cs_G = CoefficientStructure(Z4_OVER_Z2.A, G.reduct(fx.GROUP), tuple(G.constant(c) for c in Z4_OVER_Z2.names))
    assert bool(is_irreducible(Y)) == discriminates([Z4_OVER_Z2], cs_G)[0]
    assert separates([B], G)[0]
    images = sorted({tuple(h.map[g] for g in gens) for h in enumerate_homomorphisms(G, B)})
    assert images == list(Y.points)
    comps = decompose(Y)
    assert set().union(*(c.point_set for c in comps)) == Y.point_set
    assert all(c.recheck() for c in comps)


def test_trace_projection_rejects_foreign_variable(meet_set):
    from univgeom.errors import EvaluationError

    with pytest.raises(EvaluationError):
        trace_subalgebra(meet_set).trace(Var("z"))
