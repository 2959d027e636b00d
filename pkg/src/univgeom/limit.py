"""Directed systems of diagram formulas and their limit algebras.

Index sets are finite, so a directed system always has a greatest index.
Two pairs ``(x, i)`` and ``(y, j)`` name the same element of the limit exactly
when their images at that top index coincide, and the limit ends up being
isomorphic to what the top formula describes.  The construction below still
follows the general definition: every operation value is read from some index
above the arguments, and a seeded audit re-derives values from other
admissible representatives.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

from .algebra import FiniteAlgebra, is_homomorphism
from .errors import InvalidSystem
from .models import RelationalStructure, diagram_formula_of, element_variables, realizable
from .syntax import (
    AtomicFormula,
    DiagramFormula,
    Signature,
    VariableMap,
    eval_term,
    substitute,
    validate_diagram_formula,
)


@dataclass(frozen=True)
class FormulaDirectSystem:
    """Formulas ``formulas[i]`` over a finite poset, with maps ``maps[(i, j)]`` for ``i <= j``.

    ``signature`` is the language the limit is meant to interpret; ``order``
    lists every pair ``(i, j)`` with ``i <= j`` (including ``(i, i)``).
    """

    signature: Signature
    indices: tuple[Hashable, ...]
    order: frozenset
    formulas: Mapping = field(hash=False, compare=False)
    maps: Mapping = field(hash=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(self.indices))
        object.__setattr__(self, "order", frozenset(tuple(p) for p in self.order))
        object.__setattr__(self, "formulas", dict(self.formulas))
        object.__setattr__(self, "maps", {tuple(k): v for k, v in dict(self.maps).items()})

    def leq(self, i, j) -> bool:
        return (i, j) in self.order

    def top(self):
        """The greatest index, or None when there is none."""
        for t in self.indices:
            if all((i, t) in self.order for i in self.indices):
                return t
        return None

    def gamma(self, i, j) -> VariableMap:
        if (i, j) not in self.maps and i == j:
            return VariableMap.identity(self.formulas[i].variables)
        return self.maps[(i, j)]


@dataclass
class SystemReport:
    valid: bool
    violations: list[str]
    # symbols of the declared signature that no index covers
    uncovered: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.valid


def validate_system(L: FormulaDirectSystem) -> SystemReport:
    """Check directedness, the formulas, the maps, transport and coverage; list every violation."""
    problems: list[str] = []
    I = list(L.indices)
    order = L.order
    if len(set(I)) != len(I):
        problems.append("repeated index")
    if not I:
        return SystemReport(False, ["empty index set"])
    for (a, b) in order:
        if a not in L.indices or b not in L.indices:
            problems.append(f"order mentions unknown index in ({a!r}, {b!r})")
    for i in I:
        if (i, i) not in order:
            problems.append(f"order is not reflexive at {i!r}")
    ups = {i: {j for j in I if (i, j) in order} for i in I}
    for (a, b) in order:
        if a != b and (b, a) in order:
            problems.append(f"order is not antisymmetric at ({a!r}, {b!r})")
        if b in ups and a in ups:
            for c in sorted(ups[b] - ups[a], key=I.index):
                problems.append(f"order is not transitive at ({a!r}, {b!r}, {c!r})")
    # a greatest index makes the order directed
    if L.top() is None:
        for a, b in itertools.combinations(I, 2):
            if not ups[a] & ups[b]:
                problems.append(f"not directed: ({a!r}, {b!r}) have no common upper bound")

    used = set()
    for i in I:
        phi = L.formulas.get(i)
        if phi is None:
            problems.append(f"index {i!r} has no formula")
            continue
        if not phi.reduct.is_reduct_of(L.signature):
            problems.append(f"index {i!r}: reduct is not part of the declared signature")
        used.update(phi.reduct.symbols)
        report = validate_diagram_formula(phi)
        problems.extend(f"index {i!r}: {v}" for v in report.violations)
    if problems:
        return SystemReport(False, problems)

    for (i, j) in sorted(order, key=lambda p: (I.index(p[0]), I.index(p[1]))):
        try:
            g = L.gamma(i, j)
        except KeyError:
            problems.append(f"missing map for ({i!r}, {j!r})")
            continue
        if g.source != L.formulas[i].variables or not set(g.target) <= set(L.formulas[j].variables):
            problems.append(f"map ({i!r}, {j!r}) has the wrong domain or codomain")
            continue
        if i == j and not g.is_identity():
            problems.append(f"map ({i!r}, {i!r}) is not the identity")
        target = L.formulas[j].conjuncts
        moved = L.formulas[i].conjuncts if g.is_identity() else substitute(L.formulas[i], g)
        if not moved <= target:
            for c in sorted(moved - target, key=str):
                problems.append(f"transport ({i!r}, {j!r}): conjunct {c} missing at {j!r}")
    if problems:
        return SystemReport(False, problems)
    # maps that keep every variable name compose trivially
    if not all(L.gamma(i, j).is_identity() for (i, j) in order):
        for (i, j) in order:
            for k in sorted(ups[j], key=I.index):
                gij, gjk, gik = L.gamma(i, j), L.gamma(j, k), L.gamma(i, k)
                if any(gjk(gij(x)) != gik(x) for x in gij.source):
                    problems.append(f"maps do not compose at ({i!r}, {j!r}, {k!r})")

    top = L.top()
    uncovered = []
    for c in L.signature.constants:
        if any(c in phi.constant_table() for phi in L.formulas.values()):
            continue
        if c in used:
            problems.append(f"constant {c} is never bound to a variable")
        else:
            uncovered.append(c)
    for fn, arity in L.signature.functions:
        if fn not in used:
            uncovered.append(fn)
            continue
        if top is None:
            continue
        table = L.formulas[top].function_table()
        for i in I:
            g = L.gamma(i, top)
            for args in itertools.product(L.formulas[i].variables, repeat=arity):
                if (fn, tuple(g(a) for a in args)) not in table:
                    problems.append(f"operation {fn} has no value for {args} at index {i!r}")
    return SystemReport(not problems, problems, uncovered)


@dataclass(frozen=True)
class LimitAlgebra:
    algebra: FiniteAlgebra
    class_of: dict = field(hash=False, compare=False)
    representatives: tuple = ()
    # True when the system only covers part of the declared signature
    partial: bool = False

    def element(self, x: str, i) -> int:
        return self.class_of[(x, i)]


def build_limit(L: FormulaDirectSystem, allow_partial: bool = False, audit_seed: int | None = 0) -> LimitAlgebra:
    report = validate_system(L)
    if not report.valid:
        raise InvalidSystem("; ".join(report.violations))
    if report.uncovered and not allow_partial:
        raise InvalidSystem(f"uncovered symbols: {', '.join(report.uncovered)}")
    I = list(L.indices)
    sig = L.signature.reduct([s for s in L.signature.symbols if s not in report.uncovered])
    top = L.top()

    pairs = [(x, i) for i in I for x in L.formulas[i].variables]
    class_key = {(x, i): L.gamma(i, top)(x) for x, i in pairs}
    numbering: dict[str, int] = {}
    reps = []
    for p in pairs:
        key = class_key[p]
        if key not in numbering:
            numbering[key] = len(numbering)
            reps.append(p)
    class_of = {p: numbering[class_key[p]] for p in pairs}
    size = len(reps)
    members: list[list[tuple]] = [[] for _ in range(size)]
    for p in pairs:
        members[class_of[p]].append(p)

    tables_of = {i: L.formulas[i].function_table() for i in I}

    def value(fn: str, args: Sequence[tuple], upper_choices=None):
        """Class of ``fn`` applied to representatives ``args``, read at the first admissible index."""
        idx = [i for _, i in args]
        candidates = [j for j in I if all((i, j) in L.order for i in idx)]
        if upper_choices is not None:
            candidates = upper_choices(candidates)
        for j in candidates:
            key = (fn, tuple(L.gamma(i, j)(x) for x, i in args))
            y = tables_of[j].get(key)
            if y is not None:
                return class_of[(y, j)]
        raise InvalidSystem(f"no index carries a value of {fn} at {args}")

    tables = {}
    for fn, arity in sig.functions:
        tables[fn] = [value(fn, [reps[a] for a in args]) for args in itertools.product(range(size), repeat=arity)]
    consts = {}
    for c in sig.constants:
        for i in I:
            x = L.formulas[i].constant_table().get(c)
            if x is not None:
                consts[c] = class_of[(x, i)]
                break
    algebra = FiniteAlgebra(sig, size, tables, consts, "limit")

    if audit_seed is not None:
        rng = random.Random(audit_seed)
        for fn, arity in sig.functions:
            for args in itertools.product(range(size), repeat=arity):
                alt = [rng.choice(members[a]) for a in args]
                got = value(fn, alt, lambda cs: rng.sample(cs, len(cs)))
                if got != algebra.apply(fn, args):
                    raise AssertionError(f"operation {fn} is not well defined at classes {args}")
        for c in sig.constants:
            for i in I:
                x = L.formulas[i].constant_table().get(c)
                if x is not None and class_of[(x, i)] != consts[c]:
                    raise AssertionError(f"constant {c} is not well defined")
    for i in I:
        point = {x: class_of[(x, i)] for x in L.formulas[i].variables}
        for c in L.formulas[i].conjuncts:
            if not _holds_in(c, algebra, point):
                raise AssertionError(f"formula at index {i!r} fails in the limit at {c}")
    return LimitAlgebra(algebra, class_of, tuple(reps), bool(report.uncovered))


def _holds_in(c: AtomicFormula, algebra: FiniteAlgebra, point) -> bool:
    return (eval_term(c.left, algebra, point) == eval_term(c.right, algebra, point)) != c.negated


# ---------------------------------------------------------------------------
# the canonical system of a finite algebra


def index_label(reduct: Signature, variables: Sequence[str]) -> str:
    return "+".join(reduct.symbols) + "|" + "+".join(variables)


def canonical_system(B: FiniteAlgebra) -> FormulaDirectSystem:
    """One index per (reduct, non-empty set of element variables), ordered by inclusion.

    The formula at each index is the diagram of the induced local submodel and
    all maps are inclusions of variable sets.
    """
    names = element_variables(B.sig, range(B.size))
    reducts = B.sig.reducts()
    subsets = [s for r in range(1, B.size + 1) for s in itertools.combinations(range(B.size), r)]
    entries = []
    for subset in subsets:
        for ri, reduct in enumerate(reducts):
            xs = [names[m] for m in subset]
            phi = diagram_formula_of(RelationalStructure.induced(B, reduct, subset), xs)
            entries.append((index_label(reduct, xs), set(reduct.symbols), set(subset), phi))
    indices = tuple(e[0] for e in entries)
    formulas = {e[0]: e[3] for e in entries}
    order = set()
    maps = {}
    for a in entries:
        for b in entries:
            if a[1] <= b[1] and a[2] <= b[2]:
                order.add((a[0], b[0]))
                maps[(a[0], b[0])] = VariableMap.identity(a[3].variables, b[3].variables)
    return FormulaDirectSystem(B.sig, indices, frozenset(order), formulas, maps)


# ---------------------------------------------------------------------------
# embeddings into the targets


@dataclass(frozen=True)
class FactorEmbedding:
    limit: LimitAlgebra
    index: Hashable
    target: FiniteAlgebra
    map: tuple[int, ...]
    # every index above ``index``; the principal ultrafilter is generated by {index}
    filter_base: dict = field(hash=False, compare=False)
    realizations: dict = field(hash=False, compare=False)


def embed_into_factors(L: FormulaDirectSystem, targets) -> FactorEmbedding:
    """Embed the limit algebra into the target attached to the top index.

    Every formula is realized in its target first; the ultrafilter generated by
    the up-sets of the indices is principal at the top index, and the embedding
    sends ``<x, i>`` to the realization of the top image of ``x``.
    """
    if isinstance(targets, FiniteAlgebra):
        targets = {i: targets for i in L.indices}
    realizations = {}
    for i in L.indices:
        ok, witness = realizable(L.formulas[i], targets[i])
        if not ok:
            raise InvalidSystem(f"formula at index {i!r} is not realizable in its target")
        realizations[i] = witness
    limit = build_limit(L, allow_partial=True)
    top = L.top()
    base = {i: tuple(j for j in L.indices if (i, j) in L.order) for i in L.indices}
    h = realizations[top]
    image = [None] * limit.algebra.size
    for (x, i), cls in limit.class_of.items():
        val = h[L.gamma(i, top)(x)]
        if image[cls] is None:
            image[cls] = val
        elif image[cls] != val:
            raise AssertionError("the embedding is not well defined")
    target = targets[top].reduct(limit.algebra.sig)
    if len(set(image)) != len(image) or not is_homomorphism(image, limit.algebra, target):
        raise AssertionError("the constructed map is not an embedding")
    return FactorEmbedding(limit, top, targets[top], tuple(image), base, realizations)


@dataclass(frozen=True)
class InclusionResult:
    system: FormulaDirectSystem | None
    witnesses: dict = field(default_factory=dict, hash=False, compare=False)
    # first diagram formula of C with no realization in B
    refusal: DiagramFormula | None = None

    def __bool__(self):
        return self.system is not None


def limit_from_inclusion(C: FiniteAlgebra, B: FiniteAlgebra) -> InclusionResult:
    """Exhibit ``C`` as a limit algebra over ``B``: its canonical system with realizations in ``B``."""
    if C.sig != B.sig:
        raise InvalidSystem("algebras have different signatures")
    L = canonical_system(C)
    witnesses = {}
    for i in L.indices:
        ok, w = realizable(L.formulas[i], B)
        if not ok:
            return InclusionResult(None, {}, L.formulas[i])
        witnesses[i] = w
    return InclusionResult(L, witnesses)


def diagram_system_from_chain(sig: Signature, formulas: Sequence[DiagramFormula], maps: Sequence[Mapping[str, str]]):
    """A chain ``0 <= 1 <= ...`` from consecutive variable maps (composites filled in)."""
    n = len(formulas)
    idx = list(range(n))
    order = {(i, j) for i in idx for j in idx if i <= j}
    full = {}
    for i in idx:
        full[(i, i)] = VariableMap.identity(formulas[i].variables)
        for j in range(i + 1, n):
            prev = full[(i, j - 1)]
            step = VariableMap(formulas[j - 1].variables, formulas[j].variables, maps[j - 1])
            full[(i, j)] = prev.then(step)
    return FormulaDirectSystem(sig, tuple(idx), frozenset(order), dict(enumerate(formulas)), full)

