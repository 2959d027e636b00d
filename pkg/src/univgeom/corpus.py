"""Property suites over a manifest of fixtures, and the runner behind ``corpus-run``.

A manifest names fixtures (built-in or inline algebra documents), groups
them into families sharing a signature, lists coefficient families, and
says which suites to run with which parameters.  Each suite returns a
:class:`SuiteResult`; the run fails if any suite records a failure.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable

from . import fixtures as fx
from . import oracles
from .algebra import (
    CoefficientStructure,
    Congruence,
    FiniteAlgebra,
    cat_A_axioms,
    congruence_lattice_op,
    direct_product,
    enumerate_homomorphisms,
    filterproduct,
    find_isomorphism,
    image_subalgebra,
    is_A_algebra,
    kernel,
    principal_filter,
    quotient,
    trivial_algebra,
)
from .documents import algebra_from_json, parse_document
from .errors import SchemaError
from .geometry import (
    ClosedSet,
    EquationSystem,
    TraceSubalgebra,
    coordinate_algebra,
    decompose,
    is_irreducible,
    radical_member,
    solve,
)
from .limit import build_limit, canonical_system, embed_into_factors
from .models import (
    check_existential_sentence,
    check_quasi_identity,
    check_universal_sentence,
    diagram_formula_of,
    discriminates,
    exists_theory_included,
    local_submodels,
    locally_embeddable,
    realizable,
    separates,
    universal_shadow_check,
)
from .presentations import Presentation, congruent_closure_query
from .syntax import App, AtomicFormula, Const, Or, QuantifiedFormula, Signature, Term, Var, validate_diagram_formula
from .unification import theorem_a_check, theorem_b_check


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    failures: list[str] = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, message: str) -> bool:
        self.checks += 1
        if not ok:
            self.failures.append(message)
        return ok

    def to_json(self) -> dict:
        return {
            "checks": self.checks,
            "failed": len(self.failures),
            "passed": self.passed,
            "failures": self.failures[:20],
            "stats": self.stats,
        }


# ---------------------------------------------------------------------------
# manifests


def builtin_fixture(spec: str) -> FiniteAlgebra:
    """``S2``, ``Z4``, ``E:group``, ``unary:10`` (table of f), ``groupoid:7`` (seed)."""
    named = fx.standard()
    if spec in named:
        return named[spec]
    kind, _, arg = spec.partition(":")
    if kind == "E":
        sigs = {"meet": fx.SEMILATTICE, "unary": fx.UNARY, "const": fx.TWO_CONSTANTS,
                "group": fx.GROUP, "groupoid": fx.GROUPOID}
        if arg in sigs:
            return trivial_algebra(sigs[arg], f"E_{arg}")
    if kind == "unary" and arg.isdigit():
        return fx.unary_algebra([int(ch) for ch in arg])
    if kind == "groupoid" and arg.isdigit():
        return fx.random_groupoid(int(arg))
    raise SchemaError(f"unknown built-in fixture {spec!r}")


@dataclass
class Corpus:
    fixtures: dict[str, FiniteAlgebra]
    families: list[list[str]]
    coefficient_families: list[dict]
    seed: int = 0
    # fixtures the geometry suites draw systems over; all of them when empty
    geometry: list[str] = field(default_factory=list)

    def pairs(self):
        for fam in self.families:
            for c, b in itertools.product(fam, repeat=2):
                yield self.fixtures[c], self.fixtures[b]

    def algebras(self) -> list[FiniteAlgebra]:
        return [self.fixtures[n] for n in sorted(self.fixtures)]

    def coefficient_members(self):
        for fam in self.coefficient_families:
            A = self.fixtures[fam["A"]]
            yield A, [CoefficientStructure(A, self.fixtures[n], tuple(m)) for n, m in fam["members"]]

    def coefficient_triples(self):
        for A, members in self.coefficient_members():
            for C, B in itertools.product(members, repeat=2):
                yield A, C, B


def corpus_from_manifest(doc: dict) -> Corpus:
    raw = doc.get("fixtures", {})
    if not isinstance(raw, dict):
        raise SchemaError("'fixtures' must map names to algebras")
    fixtures = {}
    for name, spec in raw.items():
        if isinstance(spec, str):
            A = builtin_fixture(spec.removeprefix("builtin:"))
        elif isinstance(spec, dict):
            A = algebra_from_json(spec)
            if isinstance(A, CoefficientStructure):
                raise SchemaError(f"fixture {name!r}: coefficients belong in coefficient families")
        else:
            raise SchemaError(f"fixture {name!r} is neither a built-in name nor an algebra document")
        fixtures[name] = A.renamed(name)
    families = doc.get("families", [])
    for fam in families:
        for n in fam:
            if n not in fixtures:
                raise SchemaError(f"family mentions missing fixture {n!r}")
        if len({fixtures[n].sig for n in fam}) > 1:
            raise SchemaError(f"family {fam} mixes signatures")
    coeff = doc.get("coefficient_families", [])
    for fam in coeff:
        names = [fam.get("A")] + [m[0] for m in fam.get("members", [])]
        for n in names:
            if n not in fixtures:
                raise SchemaError(f"coefficient family mentions missing fixture {n!r}")
        A = fixtures[fam["A"]]
        for n, m in fam["members"]:
            ok, violations = is_A_algebra(CoefficientStructure(A, fixtures[n], tuple(m)))
            if not ok:
                raise SchemaError(f"{n} with map {m} is not an algebra over {fam['A']}: {violations[0]}")
    geometry = list(doc.get("geometry", []))
    for n in geometry:
        if n not in fixtures:
            raise SchemaError(f"geometry list mentions missing fixture {n!r}")
    return Corpus(fixtures, families, coeff, int(doc.get("seed", 0)), geometry)


def default_manifest() -> dict:
    text = resources.files("univgeom").joinpath("data/default_manifest.json").read_text(encoding="utf-8")
    return parse_document(text, "manifest")


# ---------------------------------------------------------------------------
# random inputs


def random_term(sig: Signature, variables, depth: int, rng: random.Random) -> Term:
    leaves = [Var(v) for v in variables] + [Const(c) for c in sig.constants]
    if depth == 0 or not sig.functions or rng.random() < 0.3:
        return rng.choice(leaves)
    fn, arity = rng.choice(sig.functions)
    return App(fn, tuple(random_term(sig, variables, depth - 1, rng) for _ in range(arity)))


def random_system(B: FiniteAlgebra, rng: random.Random, max_vars=3, max_equations=4, depth=2) -> EquationSystem:
    n = rng.randint(1, max_vars)
    variables = tuple("xyz"[i] if n <= 3 else f"x{i}" for i in range(n))
    eqs = tuple(
        AtomicFormula(random_term(B.sig, variables, depth, rng), random_term(B.sig, variables, depth, rng))
        for _ in range(rng.randint(0, max_equations))
    )
    return EquationSystem(B.sig, variables, eqs)


def galois_systems(corpus: Corpus, count: int, seed: int, **params) -> list[tuple[FiniteAlgebra, EquationSystem]]:
    rng = random.Random(seed)
    names = corpus.geometry or sorted(corpus.fixtures)
    pool = [corpus.fixtures[n] for n in names]
    out = []
    for _ in range(count):
        B = rng.choice(pool)
        out.append((B, random_system(B, rng, **params)))
    return out


# ---------------------------------------------------------------------------
# suites


def suite_galois(corpus: Corpus, count=200, seed=None, queries=8, **params) -> SuiteResult:
    res = SuiteResult("galois")
    rng = random.Random(corpus.seed if seed is None else seed)
    for B, S in galois_systems(corpus, count, rng.randrange(2**32), **params):
        Y = solve(S, B)
        tag = f"{B.name} {S}"
        res.check(list(Y.points) == oracles.solve_points(S.equations, S.variables, B), f"solve differs from brute force: {tag}")
        candidates = [
            AtomicFormula(random_term(B.sig, S.variables, 2, rng), random_term(B.sig, S.variables, 2, rng))
            for _ in range(queries)
        ]
        if not Y.is_empty():
            T = TraceSubalgebra(Y)
            for _ in range(queries):
                t = random_term(B.sig, S.variables, 2, rng)
                candidates.append(AtomicFormula(t, T.witnesses[T.trace(t)]))
        certified = 0
        for q in candidates:
            by_trace = radical_member(Y, q, "trace")
            by_points = radical_member(Y, q, "points")
            res.check(by_trace == by_points, f"trace and point membership differ for {q} on {tag}")
            if by_trace:
                certified += 1
                res.check(solve(S.extended([q]), B).points == Y.points, f"adding {q} changes the solution set of {tag}")
        res.stats["certified"] = res.stats.get("certified", 0) + certified
    return res


def suite_decomposition(corpus: Corpus, count=200, seed=None, **params) -> SuiteResult:
    res = SuiteResult("decomposition")
    rng = random.Random(corpus.seed if seed is None else seed)
    comps_total = 0
    for B, S in galois_systems(corpus, count, rng.randrange(2**32), **params):
        Y = solve(S, B)
        if Y.is_empty():
            continue
        tag = f"{B.name} {S}"
        forward = decompose(Y, "forward")
        reverse = decompose(Y, "reverse")
        comps_total += len(forward)
        res.check([c.points for c in forward] == [c.points for c in reverse], f"decomposition depends on order: {tag}")
        union = set().union(*(c.point_set for c in forward))
        res.check(union == Y.point_set, f"components do not cover {tag}")
        for a, b in itertools.permutations(forward, 2):
            res.check(not a.point_set <= b.point_set, f"component contained in another: {tag}")
        for c in forward:
            res.check(oracles.irreducible_by_points(B, c.points), f"component {c.points} is not irreducible: {tag}")
            res.check(c.recheck(), f"component system does not define the component: {tag}")
            res.check([d.points for d in decompose(c)] == [c.points], f"component decomposes further: {tag}")
        again = decompose(ClosedSet(B, Y.variables, tuple(forward)))
        res.check([c.points for c in again] == [c.points for c in forward], f"re-decomposition is not idempotent: {tag}")
    res.stats["components"] = comps_total
    return res


def suite_irreducible_discriminated(corpus: Corpus, count=60, seed=None, **params) -> SuiteResult:
    res = SuiteResult("irreducible-discriminated")
    rng = random.Random(corpus.seed if seed is None else seed)
    for B, S in galois_systems(corpus, count, rng.randrange(2**32), **params):
        Y = solve(S, B)
        if Y.is_empty():
            continue
        tag = f"{B.name} {S}"
        G, gens = coordinate_algebra(Y)
        res.check(bool(is_irreducible(Y)) == discriminates([B], G)[0], f"irreducible differs from discriminated: {tag}")
        ok, _ = separates([B], G)
        res.check(ok, f"coordinate algebra is not separated by B: {tag}")
        # homomorphisms respecting the generators are the points
        homs = enumerate_homomorphisms(G, B)
        images = sorted({tuple(h.map[g] for g in gens) for h in homs})
        res.check(images == list(Y.points), f"generator images of homomorphisms are not the points: {tag}")
    return res


def suite_theorem_a(corpus: Corpus, min_true=5, min_false=5) -> SuiteResult:
    res = SuiteResult("theorem-a")
    true = false = 0
    for C, B in corpus.pairs():
        r = theorem_a_check(C, B)
        res.check(r.agreement, f"routes disagree on ({C.name}, {B.name}): "
                  + "".join("T" if v.value else "F" for _, v in sorted(r.verdicts.items())))
        true += r.value is True
        false += r.value is False
    res.stats.update(pairs=res.checks, all_true=true, all_false=false)
    res.check(true >= min_true, f"only {true} all-true pairs")
    res.check(false >= min_false, f"only {false} all-false pairs")
    return res


def suite_theorem_b(corpus: Corpus, min_triples=10) -> SuiteResult:
    res = SuiteResult("theorem-b")
    triples = remarks = 0
    for A, C, B in corpus.coefficient_triples():
        r = theorem_b_check(A, C, B)
        triples += 1
        remarks += bool(r.remark)
        res.check(r.agreement, f"routes disagree on ({A.name}; {C.B.name} {list(C.lam)}, {B.B.name} {list(B.lam)})")
    # with trivial coefficients the verdicts match the plain checker
    for fam in corpus.families:
        for c, b in itertools.product(fam, repeat=2):
            C, B = corpus.fixtures[c], corpus.fixtures[b]
            if not C.sig.constants or not C.sig.functions:
                continue
            E = trivial_algebra(C.sig)
            lam_c, lam_b = (C.constant(C.sig.constants[0]),), (B.constant(B.sig.constants[0]),)
            cs_c, cs_b = CoefficientStructure(E, C, lam_c), CoefficientStructure(E, B, lam_b)
            if not (is_A_algebra(cs_c)[0] and is_A_algebra(cs_b)[0]):
                continue
            vb = {k: v.value for k, v in theorem_b_check(E, cs_c, cs_b).verdicts.items()}
            va = {k: v.value for k, v in theorem_a_check(C, B).verdicts.items()}
            res.check(va == vb, f"trivial coefficients change the verdicts on ({c}, {b})")
    res.stats.update(triples=triples, with_remark=remarks)
    res.check(triples >= min_triples, f"only {triples} coefficient triples")
    res.check(remarks > 0, "no triple exercised the case where B is the coefficient algebra")
    return res


def suite_limit_roundtrip(corpus: Corpus) -> SuiteResult:
    res = SuiteResult("limit-roundtrip")
    for B in corpus.algebras():
        L = canonical_system(B)
        lim = build_limit(L)
        res.check(find_isomorphism(lim.algebra, B) is not None, f"limit of the canonical system of {B.name} is not {B.name}")
        emb = embed_into_factors(L, B)
        m = emb.map
        res.check(len(set(m)) == len(m) and oracles.table_commutes(m, lim.algebra, B),
                  f"factor embedding for {B.name} fails the table check")
    for A, members in corpus.coefficient_members():
        for C in members:
            tag = f"{C.B.name} {list(C.lam)} over {A.name}"
            lim = build_limit(canonical_system(C.expand()))
            lam = tuple(lim.algebra.constant(n) for n in C.names)
            limit_cs = CoefficientStructure(A, lim.algebra.reduct(A.sig), lam)
            res.check(is_A_algebra(limit_cs)[0], f"limit of {tag} is not an algebra over {A.name}")
            res.check(find_isomorphism(lim.algebra, C.expand()) is not None, f"limit of {tag} is not isomorphic to it")
    return res


def suite_closure_oracle(corpus: Corpus, count=100, seed=None, queries=40, depth=3) -> SuiteResult:
    res = SuiteResult("closure-oracle")
    rng = random.Random(corpus.seed if seed is None else seed)
    setups = [
        (Signature((("f", 1), ("g", 1)), ("c",)), ("x", "y", "z")),
        (Signature((("m", 2), ("f", 1)), ()), ("x", "y")),
    ]
    universes = [oracles.saturation_universe(sig, vs, depth) for sig, vs in setups]
    trues = 0
    for k in range(count):
        which = k % len(setups)
        sig, variables = setups[which]
        U = universes[which]
        rels = tuple(
            AtomicFormula(random_term(sig, variables, 2, rng), random_term(sig, variables, 2, rng))
            for _ in range(rng.randint(1, 3))
        )
        P = Presentation(sig, variables, rels)
        label = oracles.saturate(rels, U)
        classes: dict[int, list[Term]] = {}
        for t in U:
            classes.setdefault(label[t], []).append(t)
        multi = [c for c in classes.values() if len(c) > 1]
        pairs = [(rng.choice(U), rng.choice(U)) for _ in range(queries // 2)]
        for _ in range(queries - len(pairs)):
            if multi:
                cls = rng.choice(multi)
                pairs.append((rng.choice(cls), rng.choice(cls)))
        for t, s in pairs:
            expected = label[t] == label[s]
            trues += expected
            got = congruent_closure_query(P, AtomicFormula(t, s), depth)
            res.check(got == expected, f"closure query {t} = {s} under {[str(r) for r in rels]}: got {got}")
    res.stats["true_queries"] = trues
    return res


def suite_ucl(corpus: Corpus, seed=None) -> SuiteResult:
    res = SuiteResult("ucl")
    for C, B in corpus.pairs():
        le = locally_embeddable(C, [B])
        shadow = universal_shadow_check(C, B, seed=corpus.seed if seed is None else seed)
        res.check(le.verdict == shadow.verdict, f"local embeddability and the universal check differ on ({C.name}, {B.name})")
        if not le.verdict:
            cert = le.certificate
            res.check(realizable(cert, C)[0] and not realizable(cert, B)[0],
                      f"certificate for ({C.name}, {B.name}) does not separate them")
        if discriminates([B], C)[0]:
            res.check(le.verdict, f"discriminated but not locally embeddable: ({C.name}, {B.name})")
    return res


def suite_operators(corpus: Corpus, congruence_pairs=50, seed=None) -> SuiteResult:
    res = SuiteResult("operators")
    rng = random.Random(corpus.seed if seed is None else seed)
    for fam in corpus.families:
        algs = [corpus.fixtures[n] for n in fam]
        for factors in itertools.chain(itertools.product(algs, repeat=2), ([a, a, a] for a in algs[:3])):
            factors = list(factors)
            size = 1
            for f in factors:
                size *= f.size
            if size > 64:
                continue
            for j in range(len(factors)):
                U, _ = filterproduct(factors, principal_filter(range(len(factors)), [j]))
                res.check(find_isomorphism(U, factors[j]) is not None,
                          f"ultraproduct at {j} of {[f.name for f in factors]} is not the factor")
        for C, B in itertools.product(algs, repeat=2):
            for h in enumerate_homomorphisms(C, B):
                Q, _ = quotient(C, kernel(h))
                res.check(find_isomorphism(Q, image_subalgebra(h)) is not None,
                          f"first isomorphism fails for {C.name} -> {B.name} {h.map}")
    hosts = [A for A in corpus.algebras() if A.size >= 3 and A.sig.functions]
    done = 0
    while done < congruence_pairs and hosts:
        M = rng.choice(hosts)
        t1 = Congruence.generated(M, [(rng.randrange(M.size), rng.randrange(M.size))])
        t2 = Congruence.generated(M, [(rng.randrange(M.size), rng.randrange(M.size))])
        theta = congruence_lattice_op("meet", t1, t2)
        Q, q = quotient(M, theta)
        Q1, q1 = quotient(M, t1)
        Q2, q2 = quotient(M, t2)
        P, _ = direct_product([Q1, Q2])
        diag = [None] * Q.size
        for m in range(M.size):
            diag[q.map[m]] = q1.map[m] * Q2.size + q2.map[m]
        res.check(len(set(diag)) == len(diag) and oracles.table_commutes(diag, Q, P),
                  f"diagonal map of {M.name} is not an embedding")
        done += 1
    return res


def suite_homomorphism_counts(corpus: Corpus) -> SuiteResult:
    res = SuiteResult("homomorphism-counts")
    for C, B in corpus.pairs():
        if C.size > 4 or B.size > 4:
            continue
        got = [h.map for h in enumerate_homomorphisms(C, B)]
        res.check(got == oracles.all_homomorphisms(C, B), f"homomorphisms {C.name} -> {B.name} differ from brute force")
    return res


def suite_model_classes(corpus: Corpus, seed=None) -> SuiteResult:
    res = SuiteResult("model-classes")
    rng = random.Random(corpus.seed if seed is None else seed)
    for C, B in corpus.pairs():
        disc = discriminates([B], C)[0]
        inj = bool(enumerate_homomorphisms(C, B, "injective"))
        eti = exists_theory_included(C, B)
        res.check(disc == inj == eti, f"embedding routes differ on ({C.name}, {B.name})")
        sep = separates([B], C)[0]
        res.check(sep == _embeds_in_power(C, B, 64), f"separation differs from embedding in a power on ({C.name}, {B.name})")
    for A in corpus.algebras():
        variables = ("x", "y")
        for _ in range(10):
            lits = tuple(
                AtomicFormula(random_term(A.sig, variables, 2, rng), random_term(A.sig, variables, 2, rng), rng.random() < 0.5)
                for _ in range(2)
            )
            sigma = QuantifiedFormula((("forall", "x"), ("forall", "y")), Or(lits))
            res.check(check_universal_sentence(A, sigma) != check_existential_sentence(A, sigma.dual()),
                      f"universal and dual existential checks agree on {A.name}: {sigma}")
    for fam in corpus.coefficient_families:
        A = corpus.fixtures[fam["A"]]
        axioms = cat_A_axioms(A)
        for n, m in fam["members"]:
            Bx = CoefficientStructure(A, corpus.fixtures[n], tuple(m)).expand()
            res.check(all(check_quasi_identity(Bx, ax) for ax in axioms), f"{n} fails the axioms over {A.name}")
        E = trivial_algebra(CoefficientStructure(A, A, tuple(range(A.size))).sig)
        res.check(all(check_quasi_identity(E, ax) for ax in axioms), f"trivial algebra fails the axioms over {A.name}")
    return res


def _embeds_in_power(C: FiniteAlgebra, B: FiniteAlgebra, bound: int) -> bool:
    """Whether ``C`` embeds into ``B^k`` for some ``k`` with ``|B|^k <= bound``.

    ``k = 0`` is allowed: the empty product is the one-element algebra.
    Powers embed into larger powers, so only the largest ``k`` is tried.
    """
    if C.size == 1:
        return True
    k = 1
    while B.size ** (k + 1) <= bound and k < C.size * C.size:
        k += 1
    P, _ = direct_product([B] * k, bound=max(bound, B.size))
    return bool(enumerate_homomorphisms(C, P, "injective")) if P.size >= C.size else False


def suite_diagram_validation(corpus: Corpus) -> SuiteResult:
    res = SuiteResult("diagram-validation")
    for A in corpus.algebras():
        if A.size > 3:
            continue
        for reduct in A.sig.reducts():
            for size in range(1, A.size + 1):
                for N in local_submodels(A, reduct, size):
                    phi = diagram_formula_of(N)
                    report = validate_diagram_formula(phi)
                    res.check(report.valid, f"diagram of {N.universe} in {A.name} rejected: {report.violations[:1]}")
                    if phi.conjuncts:
                        dropped = sorted(phi.conjuncts, key=str)[0]
                        broken = type(phi)(phi.reduct, phi.variables, phi.conjuncts - {dropped})
                        res.check(not validate_diagram_formula(broken).valid,
                                  f"diagram of {N.universe} in {A.name} accepted without {dropped}")
    return res


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "galois": suite_galois,
    "decomposition": suite_decomposition,
    "irreducible-discriminated": suite_irreducible_discriminated,
    "theorem-a": suite_theorem_a,
    "theorem-b": suite_theorem_b,
    "limit-roundtrip": suite_limit_roundtrip,
    "closure-oracle": suite_closure_oracle,
    "ucl": suite_ucl,
    "operators": suite_operators,
    "homomorphism-counts": suite_homomorphism_counts,
    "model-classes": suite_model_classes,
    "diagram-validation": suite_diagram_validation,
}


def run_manifest(doc: dict) -> dict[str, SuiteResult]:
    suites = doc.get("suites") or {}
    if not isinstance(suites, dict) or not suites:
        raise SchemaError("nothing to run: the manifest lists no suites")
    corpus = corpus_from_manifest(doc)
    out = {}
    for name, params in suites.items():
        if name not in SUITES:
            raise SchemaError(f"unknown suite {name!r}")
        out[name] = SUITES[name](corpus, **(params or {}))
    return out


def load_manifest_text(text: str) -> dict:
    doc = parse_document(text, "manifest")
    json.dumps(doc)
    return doc
