"""Seven independent routes to one question: is the finite algebra C embeddable in B?

Each route is computed by its own machinery (local submodels, existential
sentences, an explicit ultrapower, homomorphism search, limit algebras,
atomic types, and the geometry of the table presentation).  The routes are
all evaluated even when an early one already decides the answer, so any
disagreement shows up in the report.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from .algebra import (
    CoefficientStructure,
    FiniteAlgebra,
    direct_product,
    enumerate_homomorphisms,
    filterproduct,
    find_isomorphism,
    generated_subalgebra,
    generating_set,
    is_A_algebra,
    is_homomorphism,
    principal_filter,
)
from .errors import SignatureError
from .geometry import EquationSystem, TraceSubalgebra, is_irreducible, solve
from .limit import build_limit, limit_from_inclusion
from .models import discriminates, exists_theory_included, locally_embeddable
from .presentations import table_presentation
from .syntax import Term, eval_term

CONDITIONS = {
    1: "locally embeddable (universal closure)",
    2: "existential theory included",
    3: "embeds into an ultrapower",
    4: "discriminated",
    5: "limit algebra over B",
    6: "defined by a realized complete atomic type",
    7: "coordinate algebra of an irreducible algebraic set",
}


@dataclass(frozen=True)
class Verdict:
    value: bool
    certificate: str = ""
    seconds: float = field(default=0.0, compare=False)


@dataclass
class UnificationReport:
    kind: str
    c_name: str
    b_name: str
    verdicts: dict
    remark: dict = field(default_factory=dict)
    # the generic point of route 7 realizes the atomic type of C (only meaningful when route 7 holds)
    generic_point_consistent: bool | None = None

    @property
    def agreement(self) -> bool:
        values = {v.value for v in self.verdicts.values()} | set(self.remark.values())
        return len(values) == 1 and self.generic_point_consistent is not False

    @property
    def value(self) -> bool | None:
        values = {v.value for v in self.verdicts.values()}
        return values.pop() if len(values) == 1 else None

    def to_json(self, timings: bool = False) -> dict:
        out = {
            "kind": self.kind,
            "c": self.c_name,
            "b": self.b_name,
            "agreement": self.agreement,
            "verdicts": {
                str(k): {"condition": CONDITIONS[k], "value": v.value, "certificate": v.certificate}
                for k, v in sorted(self.verdicts.items())
            },
            "generic_point_consistent": self.generic_point_consistent,
        }
        if self.remark:
            out["remark"] = dict(self.remark)
        if timings:
            for k, v in self.verdicts.items():
                out["verdicts"][str(k)]["seconds"] = round(v.seconds, 6)
        return out


# ---------------------------------------------------------------------------
# atomic types


@dataclass(frozen=True)
class AtomicType:
    """The complete atomic type of a tuple, presented by the subalgebra the tuple generates.

    ``t = s`` belongs to the type iff the witnesses of ``t`` and ``s`` evaluate
    to the same element; the algebra defined by the type is ``algebra`` with
    the tuple's images at ``generators``.
    """

    host: FiniteAlgebra
    tuple: tuple[int, ...]
    variables: tuple[str, ...]
    elements: tuple[int, ...]
    witness: dict = field(hash=False, compare=False)
    algebra: FiniteAlgebra = field(hash=False, compare=False, default=None)
    generators: tuple[int, ...] = ()

    def value(self, t: Term) -> int:
        return eval_term(t, self.host, dict(zip(self.variables, self.tuple)))

    def contains(self, literal) -> bool:
        eq = self.value(literal.left) == self.value(literal.right)
        return eq != literal.negated

    def kernel_classes(self) -> list[list[str]]:
        """For each generated element, its witnessing term (distinct elements give distinct classes)."""
        return [[str(self.witness[m])] for m in self.elements]


def atp_of(B: FiniteAlgebra, tup, variables=None) -> AtomicType:
    tup = tuple(int(b) for b in tup)
    variables = tuple(variables) if variables is not None else tuple(f"x{i + 1}" for i in range(len(tup)))
    if len(variables) != len(tup):
        raise ValueError("one variable per tuple entry is needed")
    # first variable naming each distinct entry; repeated entries are equal in the type
    names = {}
    for v, b in zip(variables, tup):
        names.setdefault(b, v)
    sub = generated_subalgebra(B, tup, names)
    alg = B.relabel(sub.elements)
    index = {m: i for i, m in enumerate(sub.elements)}
    return AtomicType(B, tup, variables, sub.elements, sub.witness, alg, tuple(index[b] for b in tup))


def same_atomic_type(C: FiniteAlgebra, c, B: FiniteAlgebra, b) -> bool:
    """Whether tuples ``c`` in ``C`` and ``b`` in ``B`` satisfy the same atomic formulas.

    They do iff the subalgebra of ``C x B`` generated by the pairs ``(c_i, b_i)``
    is the graph of a bijection.
    """
    if len(c) != len(b):
        return False
    P, (p, q) = direct_product([C, B])
    seed = [ci * B.size + bi for ci, bi in zip(c, b)]
    graph = generated_subalgebra(P, seed).elements
    lefts = [p.map[m] for m in graph]
    rights = [q.map[m] for m in graph]
    return len(set(lefts)) == len(lefts) and len(set(rights)) == len(rights)


# ---------------------------------------------------------------------------
# the seven routes


def _timed(fn):
    start = time.perf_counter()
    value, cert = fn()
    return Verdict(bool(value), cert, time.perf_counter() - start)


def _route1(C, B):
    r = locally_embeddable(C, [B])
    return r.verdict, "" if r.verdict else f"unrealizable diagram: {r.certificate}"


def _route2(C, B):
    ok = exists_theory_included(C, B)
    return ok, "" if ok else "the existential closure of the diagram of C fails in B"


def _route3(C, B):
    # a two-factor ultrapower at the principal ultrafilter generated by {0}
    U, _ = filterproduct([B, B], principal_filter([0, 1], [0]))
    embeddings = enumerate_homomorphisms(C, U, "injective")
    if embeddings:
        return True, f"embedding into the ultrapower: {list(embeddings[0].map)}"
    return False, f"no injective homomorphism into the ultrapower of size {U.size}"


def _route4(C, B):
    ok, h = discriminates([B], C)
    return ok, f"embedding {list(h.map)}" if ok else "no embedding"


def _route5(C, B):
    res = limit_from_inclusion(C, B)
    if not res:
        return False, f"unrealizable in B: {res.refusal}"
    lim = build_limit(res.system)
    iso = find_isomorphism(lim.algebra, C)
    if iso is None:
        return False, "the limit algebra is not isomorphic to C"
    return True, f"limit over {len(res.system.indices)} indices, isomorphism {list(iso.map)}"


def _route6(C, B):
    gens = generating_set(C)
    for b in itertools.product(range(B.size), repeat=len(gens)):
        if same_atomic_type(C, gens, B, b):
            t = atp_of(B, b)
            if t.algebra.size == C.size:
                return True, f"generators {gens} of C share their type with {list(b)} in B"
    return False, f"no tuple of B realizes the type of the generators {gens}"


def _route7(C, B):
    P = table_presentation(C)
    Y = solve(EquationSystem(P.sig, P.variables, P.relations), B)
    if Y.is_empty():
        return (False, "the table system has no solution"), None
    T = TraceSubalgebra(Y)
    irr = is_irreducible(Y, T)
    if not irr:
        return (False, f"reducible: covered by {len(irr.cover)} proper equalizers"), None
    # send each term function to the value of its witness at the canonical generators of C
    point = dict(zip(P.variables, range(C.size)))
    image = [eval_term(w, C, point) for w in T.witnesses]
    if len(set(image)) != C.size or len(image) != C.size or not is_homomorphism(image, T.algebra, C):
        return (False, "the coordinate algebra is not isomorphic to C with generators matched"), irr.generic_point
    return (True, f"irreducible, generic point {list(irr.generic_point)}"), irr.generic_point


def _check(C: FiniteAlgebra, B: FiniteAlgebra, kind: str, c_name: str, b_name: str) -> UnificationReport:
    if C.sig != B.sig:
        raise SignatureError("algebras have different signatures")
    verdicts = {}
    for k, route in ((1, _route1), (2, _route2), (3, _route3), (4, _route4), (5, _route5), (6, _route6)):
        verdicts[k] = _timed(lambda route=route: route(C, B))
    start = time.perf_counter()
    (v7, cert7), generic = _route7(C, B)
    verdicts[7] = Verdict(v7, cert7, time.perf_counter() - start)
    consistent = None
    if v7:
        consistent = same_atomic_type(C, tuple(range(C.size)), B, generic)
    return UnificationReport(kind, c_name, b_name, verdicts, {}, consistent)


def theorem_a_check(C: FiniteAlgebra, B: FiniteAlgebra) -> UnificationReport:
    return _check(C, B, "A", C.name, B.name)


def theorem_b_check(A: FiniteAlgebra, C: CoefficientStructure, B: CoefficientStructure) -> UnificationReport:
    """The seven routes over the language with a constant for every element of ``A``.

    When ``B`` is ``A`` itself with the identity coefficient map, the report
    also carries universal and existential equivalence of ``C`` and ``A``
    over ``A``.
    """
    for label, cs in (("C", C), ("B", B)):
        if cs.A != A:
            raise SignatureError(f"{label} is not an algebra over the given coefficient algebra")
        ok, violations = is_A_algebra(cs)
        if not ok:
            raise SignatureError(f"{label} is not an A-algebra: {violations[0]}")
    Cx, Bx = C.expand(), B.expand()
    report = _check(Cx, Bx, "B", C.B.name, B.B.name)
    if B.B == A and B.lam == tuple(range(A.size)):
        report.remark = {
            "universal_equivalent": bool(locally_embeddable(Cx, [Bx])) and bool(locally_embeddable(Bx, [Cx])),
            "existential_equivalent": exists_theory_included(Cx, Bx) and exists_theory_included(Bx, Cx),
        }
    return report
