import itertools

import pytest
from hypothesis import given, strategies as st

from strategies import terms
from univgeom import fixtures as fx
from univgeom import oracles
from univgeom.algebra import enumerate_homomorphisms
from univgeom.errors import SignatureError
from univgeom.models import (
    RelationalStructure,
    check_existential_sentence,
    check_quasi_identity,
    check_sentence,
    check_universal_sentence,
    diagram_formula_of,
    diagram_of,
    discriminates,
    exists_theory_included,
    local_submodels,
    locally_embeddable,
    realizable,
    separates,
    universal_shadow_check,
)
from univgeom.syntax import AtomicFormula, DiagramFormula, Or, QuantifiedFormula, Signature, Var, parse_atomic, parse_sentence

STD = fx.standard()
STD.update((U.name, U) for U in fx.unary_algebras())
STD["U120"] = fx.unary_algebra([1, 2, 0], "U120")
EMPTY = Signature((), ())
MUL = Signature((("mul", 2),), ())
UNIT = Signature((), ("e",))


def test_local_submodels_s2():
    S2 = STD["S2"]
    subs = local_submodels(S2, S2.sig, 2)
    assert len(subs) == 1
    assert subs[0].relations["meet"] == {(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 1, 1)}


def test_local_submodels_z4_points():
    subs = local_submodels(STD["Z4"], MUL, 1)
    # only 0 is idempotent in Z4
    assert [bool(N.relations["mul"]) for N in subs] == [True, False, False, False]


def test_local_submodels_bare_points():
    for M in STD.values():
        assert len(local_submodels(M, EMPTY, 1)) == M.size
    with pytest.raises(SignatureError):
        local_submodels(STD["S2"], MUL, 1)
    with pytest.raises(ValueError):
        local_submodels(STD["S2"], EMPTY, 3)


def test_diagram_of_s2():
    S2 = STD["S2"]
    phi = diagram_formula_of(RelationalStructure.induced(S2, S2.sig, [0, 1]), ["u", "v"])
    expected = {"u != v", "meet(u,u) = u", "meet(u,v) = u", "meet(v,u) = u", "meet(v,v) = v"}
    assert expected <= {str(c) for c in phi.conjuncts}


def test_diagram_constant_literals():
    Z2 = STD["Z2"]
    at0 = diagram_formula_of(RelationalStructure.induced(Z2, UNIT, [0]), ["x"])
    at1 = diagram_formula_of(RelationalStructure.induced(Z2, UNIT, [1]), ["x"])
    assert {str(c) for c in at0.conjuncts} == {"x = e"}
    assert {str(c) for c in at1.conjuncts} == {"x != e"}


def test_realizable_examples():
    S2, Z2, Z4 = STD["S2"], STD["Z2"], STD["Z4"]
    ok, witness = realizable(diagram_of(S2), S2)
    assert ok and sorted(witness.values()) == [0, 1]
    phi = DiagramFormula(EMPTY, ("x", "y"), frozenset({AtomicFormula(Var("x"), Var("y"), True)}))
    assert realizable(phi, STD["E_group"].reduct(EMPTY)) == (False, None)
    ok, witness = realizable(diagram_of(Z2), Z4)
    assert ok and sorted(witness.values()) == [0, 2]


def test_locally_embeddable_examples():
    Z2, Z4 = STD["Z2"], STD["Z4"]
    assert locally_embeddable(Z2, [Z2])
    r = locally_embeddable(Z4, [Z2])
    assert not r and r.certificate is not None
    assert not realizable(r.certificate, Z2)[0]
    for B in (Z2, Z4, STD["V4"], STD["Z3"]):
        assert locally_embeddable(STD["E_group"], [B])


def test_separation_examples():
    Z2, Z4, V4 = STD["Z2"], STD["Z4"], STD["V4"]
    assert separates([Z2], Z2)[0] and discriminates([Z2], Z2)[0]
    assert not discriminates([Z2], Z4)[0]
    assert separates([Z2], V4) == (True, None)
    assert not discriminates([Z2], V4)[0]
    ok, pair = separates([Z2], Z4)
    assert not ok and pair == (0, 2)


def test_universal_sentences():
    Z2, Z4 = STD["Z2"], STD["Z4"]
    sq = parse_sentence("forall x. mul(x,x) = e", fx.GROUP)
    assert check_universal_sentence(Z2, sq)
    assert not check_universal_sentence(Z4, sq)
    assert check_sentence(Z4, parse_sentence("forall x. x = x", fx.GROUP))
    with pytest.raises(ValueError):
        check_universal_sentence(Z2, sq.dual())


def test_quasi_identities():
    qi = parse_sentence("forall x. mul(x,x) = e -> x = e", fx.GROUP)
    assert check_quasi_identity(STD["Z3"], qi)
    assert not check_quasi_identity(STD["Z2"], qi)
    assert check_quasi_identity(STD["Z2"], parse_sentence("forall x. x = x -> x = x", fx.GROUP))
    with pytest.raises(ValueError):
        check_quasi_identity(STD["Z2"], parse_sentence("forall x. x != e", fx.GROUP))


def test_exists_theory_examples():
    assert exists_theory_included(STD["Z2"], STD["Z4"])
    assert not exists_theory_included(STD["Z4"], STD["Z2"])
    E = STD["E_unary"]
    assert exists_theory_included(E, STD["N2"]) == bool(enumerate_homomorphisms(E, STD["N2"], "injective"))
    with pytest.raises(SignatureError):
        exists_theory_included(STD["Z2"], STD["S2"])


FAMILIES = [
    ["Z2", "Z3", "Z4", "V4", "E_group"],
    ["N2", "U00", "U01", "U120", "E_unary"],
    ["S2", "E_meet"],
    ["C01", "E_const"],
]
PAIRS = [(STD[c], STD[b]) for fam in FAMILIES for c, b in itertools.product(fam, repeat=2)]


def pair_id(p):
    return f"{p[0].name}-{p[1].name}"


def embeds_in_some_power(C, B, bound=64):
    """Brute force over every power of ``B`` within ``bound``, including the empty product.

    A map into ``B^k`` is a homomorphism iff each coordinate is, so candidate
    embeddings are k-tuples of brute-force homomorphisms ``C -> B``.
    """
    if C.size == 1:
        return True
    homs = oracles.all_homomorphisms(C, B)
    # one coordinate per pair of elements always suffices
    k = 1
    while B.size ** k <= bound and k <= C.size * C.size:
        for combo in itertools.combinations_with_replacement(homs, k):
            if len({tuple(h[c] for h in combo) for c in range(C.size)}) == C.size:
                return True
        k += 1
    return False


@pytest.mark.parametrize("pair", PAIRS, ids=pair_id)
def test_finite_embedding_three_ways(pair):
    C, B = pair
    injective = any(len(set(m)) == C.size for m in oracles.all_homomorphisms(C, B))
    assert discriminates([B], C)[0] == injective == exists_theory_included(C, B)
    if injective:
        assert locally_embeddable(C, [B])


@pytest.mark.parametrize("pair", PAIRS, ids=pair_id)
def test_separation_is_embedding_into_a_product(pair):
    C, B = pair
    assert separates([B], C)[0] == embeds_in_some_power(C, B)


@pytest.mark.parametrize("pair", PAIRS, ids=pair_id)
def test_local_embeddability_matches_universal_fragment(pair):
    C, B = pair
    assert bool(locally_embeddable(C, [B])) == bool(universal_shadow_check(C, B, seed=7))


def universal_clauses(B):
    lit = st.builds(AtomicFormula, terms(B.sig, ("x", "y"), 2), terms(B.sig, ("x", "y"), 2), st.booleans())
    return st.lists(lit, min_size=1, max_size=3).map(
        lambda ls: QuantifiedFormula((("forall", "x"), ("forall", "y")), ls[0] if len(ls) == 1 else Or(tuple(ls))))


@given(st.sampled_from(list(STD.values())).flatmap(lambda B: st.tuples(st.just(B), universal_clauses(B))))
def test_universal_is_dual_to_existential(case):
    B, sigma = case
    assert check_universal_sentence(B, sigma) != check_existential_sentence(B, sigma.dual())


def test_shadow_check_reports_separating_sentence():
    r = universal_shadow_check(STD["Z4"], STD["Z2"])
    assert not r
    assert check_universal_sentence(STD["Z2"], r.separating_sentence)
    assert not check_universal_sentence(STD["Z4"], r.separating_sentence)


def test_parse_atomic_in_diagram_variables():
    q = parse_atomic("mul(x,y) = e", fx.GROUP, ["x", "y"])
    assert q.variables() == {"x", "y"}
