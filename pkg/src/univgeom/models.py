"""Local submodels, diagram formulas and the model-class checks built on them."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .algebra import CoefficientStructure, FiniteAlgebra, enumerate_homomorphisms
from .errors import SignatureError
from .syntax import (
    And,
    App,
    AtomicFormula,
    Const,
    DiagramFormula,
    Not,
    Or,
    QuantifiedFormula,
    Signature,
    Term,
    Var,
    enumerate_terms,
    eval_matrix,
    eval_term,
)


@dataclass(frozen=True)
class RelationalStructure:
    """The relational version of ``host`` over ``reduct``, restricted to ``universe``.

    ``relations[F]`` holds tuples ``(a1, ..., an, a0)`` with ``F(a1..an) = a0``
    and every entry in the universe; ``relations[c]`` holds ``(a,)`` when ``c = a``.
    """

    host: FiniteAlgebra
    reduct: Signature
    universe: tuple[int, ...]
    relations: dict = field(hash=False, compare=False)

    @classmethod
    def induced(cls, host: FiniteAlgebra, reduct: Signature, universe: Iterable[int]) -> RelationalStructure:
        if not reduct.is_reduct_of(host.sig):
            raise SignatureError("the reduct is not a sublanguage of the algebra's signature")
        U = tuple(sorted(set(universe)))
        inside = set(U)
        rel = {}
        for fn, arity in reduct.functions:
            rel[fn] = frozenset(
                args + (host.apply(fn, args),)
                for args in itertools.product(U, repeat=arity)
                if host.apply(fn, args) in inside
            )
        for c in reduct.constants:
            v = host.constant(c)
            rel[c] = frozenset({(v,)}) if v in inside else frozenset()
        return cls(host, reduct, U, rel)

    def __len__(self):
        return len(self.universe)


def local_submodels(M: FiniteAlgebra, reduct: Signature, size: int) -> list[RelationalStructure]:
    """Induced substructures on every subset of exactly ``size`` elements, in lexicographic order."""
    if not reduct.is_reduct_of(M.sig):
        raise SignatureError("the reduct is not a sublanguage of the algebra's signature")
    if not 1 <= size <= M.size:
        raise ValueError(f"size must lie between 1 and {M.size}")
    return [RelationalStructure.induced(M, reduct, U) for U in itertools.combinations(range(M.size), size)]


def element_variables(sig: Signature, elements: Sequence[int]) -> list[str]:
    stem = "x"
    while any(f"{stem}{m}" in sig for m in elements):
        stem = "_" + stem
    return [f"{stem}{m}" for m in elements]


def diagram_formula_of(N: RelationalStructure, names: Sequence[str] | None = None) -> DiagramFormula:
    """The complete literal description of ``N``: one variable per element."""
    names = list(names) if names is not None else element_variables(N.host.sig, N.universe)
    var = dict(zip(N.universe, (Var(n) for n in names)))
    conj = set()
    for a, b in itertools.permutations(N.universe, 2):
        conj.add(AtomicFormula(var[a], var[b], True))
    for fn, arity in N.reduct.functions:
        rel = N.relations[fn]
        for tup in itertools.product(N.universe, repeat=arity + 1):
            args, val = tup[:arity], tup[arity]
            atom = AtomicFormula(App(fn, tuple(var[a] for a in args)), var[val])
            conj.add(atom if args + (val,) in rel else atom.negate())
    for c in N.reduct.constants:
        for a in N.universe:
            atom = AtomicFormula(var[a], Const(c))
            conj.add(atom if (a,) in N.relations[c] else atom.negate())
    return DiagramFormula(N.reduct, tuple(names), frozenset(conj))


def diagram_of(C: FiniteAlgebra) -> DiagramFormula:
    """Diagram formula of the whole algebra over its full signature."""
    return diagram_formula_of(RelationalStructure.induced(C, C.sig, range(C.size)))


def realizable(phi: DiagramFormula, B: FiniteAlgebra) -> tuple[bool, dict[str, int] | None]:
    """Search an injective assignment of the variables of ``phi`` satisfying every conjunct."""
    if not phi.reduct.is_reduct_of(B.sig):
        raise SignatureError("the algebra does not interpret the formula's reduct")
    X = list(phi.variables)
    if len(X) > B.size:
        return False, None
    pos = {v: i for i, v in enumerate(X)}
    # each conjunct is checked as soon as its last variable is assigned
    checks: list[list[AtomicFormula]] = [[] for _ in X]
    closed = []
    for c in phi.conjuncts:
        vs = c.variables()
        if vs:
            checks[max(pos[v] for v in vs)].append(c)
        else:
            closed.append(c)
    if not all(_holds(c, B, {}) for c in closed):
        return False, None
    point: dict[str, int] = {}
    used: set[int] = set()

    def extend(i: int) -> bool:
        if i == len(X):
            return True
        for b in range(B.size):
            if b in used:
                continue
            point[X[i]] = b
            if all(_holds(c, B, point) for c in checks[i]):
                used.add(b)
                if extend(i + 1):
                    return True
                used.discard(b)
        del point[X[i]]
        return False

    if extend(0):
        return True, dict(point)
    return False, None


def _holds(c: AtomicFormula, B: FiniteAlgebra, point) -> bool:
    return (eval_term(c.left, B, point) == eval_term(c.right, B, point)) != c.negated


def _members(K) -> list:
    if isinstance(K, (FiniteAlgebra, CoefficientStructure)):
        return [K]
    K = list(K)
    if not K:
        raise ValueError("the class must be non-empty")
    return K


def _plain(M) -> FiniteAlgebra:
    return M.expand() if isinstance(M, CoefficientStructure) else M


@dataclass(frozen=True)
class LocalEmbeddability:
    verdict: bool
    certificate: DiagramFormula | None = None

    def __bool__(self):
        return self.verdict


def locally_embeddable(C, K) -> LocalEmbeddability:
    """Whether every local submodel of ``C`` is realizable in some member of ``K``.

    The diagram of all of ``C`` is tried first; if it is realizable the answer
    is yes.  Otherwise submodels are searched by size, then reduct, then subset,
    and the first unrealizable diagram formula is returned as the certificate.
    """
    C = _plain(C)
    members = [_plain(B) for B in _members(K)]
    for B in members:
        if B.sig != C.sig:
            raise SignatureError("class members and the algebra have different signatures")

    def somewhere(phi):
        return any(realizable(phi, B)[0] for B in members)

    if somewhere(diagram_of(C)):
        return LocalEmbeddability(True)
    for size in range(1, C.size + 1):
        for reduct in C.sig.reducts():
            for N in local_submodels(C, reduct, size):
                phi = diagram_formula_of(N)
                if not somewhere(phi):
                    return LocalEmbeddability(False, phi)
    raise AssertionError("the full diagram failed but every local submodel was realizable")


def separates(K, C) -> tuple[bool, tuple[int, int] | None]:
    """Whether homomorphisms into members of ``K`` tell apart every pair of elements of ``C``.

    Returns the first inseparable pair when they do not.
    """
    members = _members(K)
    homs = [h for B in members for h in enumerate_homomorphisms(C, B)]
    size = _plain(C).size
    for a, b in itertools.combinations(range(size), 2):
        if not any(h.map[a] != h.map[b] for h in homs):
            return False, (a, b)
    return True, None


def discriminates(K, C):
    """Whether some member of ``K`` receives an embedding of the finite algebra ``C``.

    Returns ``(verdict, embedding or None)``.
    """
    for B in _members(K):
        mode = "fixing-injective" if isinstance(C, CoefficientStructure) else "injective"
        found = enumerate_homomorphisms(C, B, mode)
        if found:
            return True, found[0]
    return False, None


# ---------------------------------------------------------------------------
# sentences


def _points(B: FiniteAlgebra, variables: Sequence[str]):
    for values in itertools.product(range(B.size), repeat=len(variables)):
        yield dict(zip(variables, values))


def universal_counterexample(B: FiniteAlgebra, sentence: QuantifiedFormula) -> dict[str, int] | None:
    if not sentence.is_universal():
        raise ValueError("expected a universal sentence")
    for point in _points(B, sentence.variables):
        if not eval_matrix(sentence.matrix, B, point):
            return point
    return None


def check_universal_sentence(B: FiniteAlgebra, sentence: QuantifiedFormula) -> bool:
    return universal_counterexample(_plain(B), sentence) is None


def existential_witness(B: FiniteAlgebra, sentence: QuantifiedFormula) -> dict[str, int] | None:
    if not sentence.is_existential():
        raise ValueError("expected an existential sentence")
    for point in _points(B, sentence.variables):
        if eval_matrix(sentence.matrix, B, point):
            return point
    return None


def check_existential_sentence(B: FiniteAlgebra, sentence: QuantifiedFormula) -> bool:
    return existential_witness(_plain(B), sentence) is not None


def check_sentence(B: FiniteAlgebra, sentence: QuantifiedFormula) -> bool:
    """Truth of a universal or existential sentence; other prefixes are refused."""
    if sentence.is_universal():
        return check_universal_sentence(B, sentence)
    if sentence.is_existential():
        return check_existential_sentence(B, sentence)
    raise ValueError("only universal or existential sentences are evaluated")


def check_quasi_identity(B: FiniteAlgebra, qi: QuantifiedFormula) -> bool:
    parts = qi.horn_parts()
    if parts is None:
        raise ValueError("not a quasi-identity")
    premises, conclusion = parts
    B = _plain(B)
    for point in _points(B, qi.variables):
        if all(_holds(p, B, point) for p in premises) and not _holds(conclusion, B, point):
            return False
    return True


def diagram_sentence(phi: DiagramFormula) -> QuantifiedFormula:
    """``exists X . (conjunction of phi)``."""
    parts = tuple(phi.sorted_conjuncts())
    matrix = parts[0] if len(parts) == 1 else And(parts)
    return QuantifiedFormula(tuple(("exists", v) for v in phi.variables), matrix)


def exists_theory_included(C, B) -> bool:
    """Whether every existential sentence true in ``C`` is true in ``B``.

    For finite ``C`` it suffices to check the existential closure of the
    diagram of ``C`` itself, since every other existential sentence true in
    ``C`` follows from it.
    """
    C, B = _plain(C), _plain(B)
    if C.sig != B.sig:
        raise SignatureError("algebras have different signatures")
    return check_existential_sentence(B, diagram_sentence(diagram_of(C)))


# ---------------------------------------------------------------------------
# bounded universal-fragment comparison


@dataclass(frozen=True)
class ShadowResult:
    verdict: bool
    sentences_checked: int
    # a universal sentence true in B and false in C, when one was found
    separating_sentence: QuantifiedFormula | None = None

    def __bool__(self):
        return self.verdict


def term_pool(sig: Signature, variables: Sequence[str], rng: random.Random, deep_samples: int = 30) -> list[Term]:
    """All terms of depth at most one plus a seeded sample of depth-two terms."""
    shallow = enumerate_terms(sig, variables, 1)
    if deep_samples <= 0 or not sig.functions:
        return shallow
    deep = []
    for _ in range(deep_samples):
        fn, arity = rng.choice(sig.functions)
        args = [rng.choice(shallow) for _ in range(arity)]
        t = App(fn, tuple(args))
        if t not in shallow and t not in deep:
            deep.append(t)
    return shallow + deep


def _profile_sentence(C: FiniteAlgebra, variables: Sequence[str], values: Sequence[int], pool: Sequence[Term]):
    """``forall X . not(profile)`` where the profile fixes which pool terms are equal at ``values``."""
    point = dict(zip(variables, values))
    reps: dict[int, Term] = {}
    lits = []
    for t in pool:
        v = eval_term(t, C, point)
        if v in reps:
            lits.append(AtomicFormula(t, reps[v]))
        else:
            reps[v] = t
    for a, b in itertools.combinations(reps.values(), 2):
        lits.append(AtomicFormula(a, b, True))
    # fixing the inequations first makes most points fail fast
    lits.sort(key=lambda lit: not lit.negated)
    matrix = Not(lits[0] if len(lits) == 1 else And(tuple(lits)))
    return QuantifiedFormula(tuple(("forall", v) for v in variables), matrix)


def _random_clause(pool: Sequence[Term], variables: Sequence[str], rng: random.Random):
    lits = []
    for _ in range(rng.randint(1, 3)):
        a, b = rng.choice(pool), rng.choice(pool)
        lits.append(AtomicFormula(a, b, rng.random() < 0.5))
    used = sorted(set().union(*(lit.variables() for lit in lits)), key=list(variables).index)
    matrix = lits[0] if len(lits) == 1 else Or(tuple(lits))
    return QuantifiedFormula(tuple(("forall", v) for v in used), matrix)


def universal_shadow_check(C, B, seed: int = 0, deep_samples: int = 30, random_clauses: int = 40) -> ShadowResult:
    """Compare bounded universal theories: is every sampled universal sentence true in ``B`` also true in ``C``?

    For each tuple of at most ``|C|`` elements of ``C`` the sentence saying
    "no tuple looks like this one" (over a term pool) is false in ``C``; it is
    evaluated in ``B``.  Seeded random universal clauses are added on top.
    """
    C, B = _plain(C), _plain(B)
    if C.sig != B.sig:
        raise SignatureError("algebras have different signatures")
    rng = random.Random(seed)
    checked = 0
    for n in range(1, C.size + 1):
        variables = element_variables(C.sig, range(n))
        pool = term_pool(C.sig, variables, rng, deep_samples)
        for values in itertools.product(range(C.size), repeat=n):
            sigma = _profile_sentence(C, variables, values, pool)
            checked += 1
            if check_universal_sentence(B, sigma):
                return ShadowResult(False, checked, sigma)
        for _ in range(random_clauses):
            sigma = _random_clause(pool, variables, rng)
            checked += 1
            if check_universal_sentence(B, sigma) and not check_universal_sentence(C, sigma):
                return ShadowResult(False, checked, sigma)
    return ShadowResult(True, checked)
