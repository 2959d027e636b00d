import itertools

import pytest
from hypothesis import given, strategies as st

from univgeom import fixtures as fx
from univgeom import oracles
from univgeom.algebra import CoefficientStructure, find_isomorphism, trivial_algebra
from univgeom.errors import SignatureError
from univgeom.syntax import AtomicFormula, enumerate_terms, eval_term, parse_atomic
from univgeom.unification import atp_of, same_atomic_type, theorem_a_check, theorem_b_check

STD = fx.standard()
STD.update((U.name, U) for U in fx.unary_algebras())


def values(report):
    return [report.verdicts[k].value for k in range(1, 8)]


@pytest.mark.parametrize("c,b,expected", [("Z2", "Z2", True), ("Z4", "Z2", False), ("E_meet", "S2", True)])
def test_theorem_a_examples(c, b, expected):
    r = theorem_a_check(STD[c], STD[b])
    assert values(r) == [expected] * 7
    assert r.agreement and r.value is expected
    if expected:
        assert r.generic_point_consistent


def test_theorem_a_refuses_mixed_signatures():
    with pytest.raises(SignatureError):
        theorem_a_check(STD["Z2"], STD["S2"])


def test_report_json_hides_timings_by_default():
    r = theorem_a_check(STD["Z4"], STD["Z2"])
    doc = r.to_json()
    assert doc["agreement"] is True
    assert all("seconds" not in v for v in doc["verdicts"].values())
    assert all("seconds" in v for v in r.to_json(timings=True)["verdicts"].values())
    assert all(v["certificate"] for v in doc["verdicts"].values())


FAMILIES = [
    ["Z2", "Z3", "Z4", "V4", "E_group"],
    ["N2", "U00", "U01", "U10", "U11", "E_unary"],
    ["S2", "E_meet"],
    ["C01", "E_const"],
]


@pytest.mark.parametrize("pair", [p for fam in FAMILIES for p in itertools.product(fam, repeat=2)], ids="-".join)
def test_theorem_a_agrees_with_brute_force_embedding(pair):
    C, B = STD[pair[0]], STD[pair[1]]
    r = theorem_a_check(C, B)
    embeds = any(len(set(m)) == C.size for m in oracles.all_homomorphisms(C, B))
    assert r.agreement
    assert r.value is embeds


def groupoid_pairs():
    return st.tuples(st.integers(0, 10**6), st.integers(0, 10**6)).map(
        lambda s: (fx.random_groupoid(s[0]), fx.random_groupoid(s[1])))


@given(groupoid_pairs())
def test_theorem_a_on_random_groupoids(pair):
    C, B = pair
    r = theorem_a_check(C, B)
    assert r.agreement
    assert theorem_a_check(C, C).value is True


Z2, Z4, V4 = STD["Z2"], STD["Z4"], STD["V4"]


def test_theorem_b_examples():
    z2 = CoefficientStructure(Z2, Z2, (0, 1))
    r = theorem_b_check(Z2, z2, z2)
    assert values(r) == [True] * 7 and r.agreement
    assert r.remark and all(r.remark.values())
    z4 = CoefficientStructure(Z2, Z4, (0, 2))
    r = theorem_b_check(Z2, z4, z4)
    assert values(r) == [True] * 7 and r.agreement
    v4 = CoefficientStructure(Z2, V4, (0, 1))
    r = theorem_b_check(Z2, v4, z2)
    assert values(r) == [False] * 7 and r.agreement
    assert r.remark and not any(r.remark.values())


def test_theorem_b_coefficients_restrict_embeddings():
    # V4 embeds in V4, but not when the coefficient images disagree
    a = CoefficientStructure(Z2, V4, (0, 1))
    b = CoefficientStructure(Z2, V4, (0, 2))
    assert theorem_b_check(Z2, a, b).value is True
    E = STD["E_group"]
    r = theorem_b_check(Z2, CoefficientStructure(Z2, Z4, (0, 2)), a)
    assert r.agreement and r.value is False
    with pytest.raises(ValueError):
        theorem_b_check(Z2, CoefficientStructure(E, V4, (0,)), a)


# a one-element coefficient algebra identifies all constants, so only the group family qualifies
@pytest.mark.parametrize("pair", list(itertools.product(FAMILIES[0], repeat=2)), ids="-".join)
def test_theorem_b_with_trivial_coefficients_matches_theorem_a(pair):
    C, B = STD[pair[0]], STD[pair[1]]
    E = trivial_algebra(C.sig)
    c0 = C.sig.constants[0]
    rb = theorem_b_check(E, CoefficientStructure(E, C, (C.constant(c0),)), CoefficientStructure(E, B, (B.constant(c0),)))
    assert values(rb) == values(theorem_a_check(C, B))


def test_atp_examples():
    S2 = STD["S2"]
    t = atp_of(S2, (0, 1))
    assert sorted(t.elements) == [0, 1]
    assert t.contains(parse_atomic("meet(x1,x2) = x1", S2.sig, ["x1", "x2"]))
    assert t.contains(parse_atomic("x1 != x2", S2.sig, ["x1", "x2"]))
    t = atp_of(Z4, (2,))
    assert sorted(t.elements) == [0, 2]
    t = atp_of(Z2, (1,))
    assert t.algebra.size == 2
    assert t.contains(parse_atomic("mul(x1,x1) = e", Z2.sig, ["x1"]))
    assert t.contains(parse_atomic("x1 != e", Z2.sig, ["x1"]))
    assert find_isomorphism(t.algebra, Z2) is not None
    with pytest.raises(ValueError):
        atp_of(Z2, (1,), ["x", "y"])


def tuples_in(B, n=2):
    return st.tuples(*[st.integers(0, B.size - 1)] * n)


ALG = st.sampled_from([STD[n] for n in ("S2", "N2", "C01", "Z3", "Z4", "V4", "U01")])


@given(ALG.flatmap(lambda B: st.tuples(st.just(B), tuples_in(B), tuples_in(B))))
def test_same_atomic_type_matches_equations(case):
    B, c, b = case
    variables = ["x1", "x2"]
    at_c, at_b = dict(zip(variables, c)), dict(zip(variables, b))
    # depth 2 reaches every element of the generated subalgebras of these squares
    depth = 2 if any(a > 1 for _, a in B.sig.functions) else 3
    pool = enumerate_terms(B.sig, variables, depth)
    pairs = {(eval_term(t, B, at_c), eval_term(t, B, at_b)) for t in pool}
    # s = t holds at c iff it holds at b for all terms exactly when the value pairs form a bijection
    agree = len({x for x, _ in pairs}) == len(pairs) == len({y for _, y in pairs})
    assert same_atomic_type(B, c, B, b) == agree
    ty = atp_of(B, c, variables)
    for s, t in itertools.combinations(pool[:12], 2):
        assert ty.contains(AtomicFormula(s, t)) == (eval_term(s, B, at_c) == eval_term(t, B, at_c))
