"""Solution sets of equation systems over a finite algebra and their geometry.

The radical of a solution set Y is infinite, so it is represented by the
algebra of term functions on Y (the trace subalgebra): two terms agree on
every point of Y exactly when their traces coincide.  Irreducibility and
decomposition are read off the equalizers of distinct traces.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import kernels
from ._config import check_bound
from .algebra import CoefficientStructure, FiniteAlgebra
from .errors import EmptyVarietyError, EvaluationError, SignatureError
from .syntax import App, AtomicFormula, Const, Signature, Term, Var, check_term, eval_term


def _as_algebra(B) -> FiniteAlgebra:
    return B.expand() if isinstance(B, CoefficientStructure) else B


@dataclass(frozen=True)
class EquationSystem:
    """Equations over the variable list; with ``coefficients`` the constants of ``L_A`` may occur."""

    sig: Signature
    variables: tuple[str, ...]
    equations: tuple[AtomicFormula, ...] = ()
    coefficients: CoefficientStructure | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "equations", tuple(self.equations))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("repeated variable in the system")
        lang = self.language
        for eq in self.equations:
            if eq.negated:
                raise ValueError(f"systems contain equations only, got {eq}")
            check_term(eq.left, lang, self.variables)
            check_term(eq.right, lang, self.variables)

    @property
    def language(self) -> Signature:
        return self.coefficients.sig if self.coefficients is not None else self.sig

    @property
    def n(self) -> int:
        return len(self.variables)

    def extended(self, more: Iterable[AtomicFormula]) -> EquationSystem:
        eqs = list(self.equations)
        for q in more:
            if q not in eqs:
                eqs.append(q)
        return EquationSystem(self.sig, self.variables, tuple(eqs), self.coefficients)

    def __str__(self):
        return "{" + ", ".join(str(e) for e in self.equations) + "}"


@dataclass(frozen=True)
class AlgebraicSet:
    algebra: FiniteAlgebra
    variables: tuple[str, ...]
    points: tuple[tuple[int, ...], ...]
    system: EquationSystem | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(sorted(set(map(tuple, self.points)))))

    @property
    def n(self) -> int:
        return len(self.variables)

    def __len__(self):
        return len(self.points)

    def __contains__(self, p) -> bool:
        return tuple(p) in self.point_set

    @property
    def point_set(self) -> frozenset:
        return frozenset(self.points)

    def is_empty(self) -> bool:
        return not self.points

    def issubset(self, other: AlgebraicSet) -> bool:
        return self.point_set <= other.point_set

    def assignment(self, p: Sequence[int]) -> dict[str, int]:
        return dict(zip(self.variables, p))

    def recheck(self) -> bool:
        """Re-solve the defining system and compare point sets."""
        return self.system is None or solve(self.system, self.algebra).points == self.points


def _compile(t: Term, B: FiniteAlgebra, var_index: dict, fn_index: dict, code: list) -> int:
    """Append postfix code for ``t``; return the stack depth it needs."""
    if isinstance(t, Var):
        code += (kernels.OP_VAR, var_index[t.name])
        return 1
    if isinstance(t, Const):
        code += (kernels.OP_CONST, B.constant(t.name))
        return 1
    depth = 0
    for pos, a in enumerate(t.args):
        depth = max(depth, pos + _compile(a, B, var_index, fn_index, code))
    code += (kernels.OP_APPLY, fn_index[t.fn])
    return max(depth, 1)


def solve(S: EquationSystem, B) -> AlgebraicSet:
    """All points of ``B^n`` satisfying every equation of ``S``, in lexicographic order."""
    if isinstance(B, CoefficientStructure):
        if S.coefficients is not None and S.coefficients.A != B.A:
            raise SignatureError("system and algebra use different coefficient algebras")
        B = B.expand()
    elif S.coefficients is not None and B != S.coefficients.expand():
        raise SignatureError("a system with coefficients needs an algebra with coefficients")
    if not S.language.is_reduct_of(B.sig):
        raise SignatureError("the algebra does not interpret the system's language")
    k, n = B.size, S.n
    check_bound(k**n, "solution space")
    var_index = {v: i for i, v in enumerate(S.variables)}
    fn_index = {f: i for i, (f, _) in enumerate(B.sig.functions)}
    code: list[int] = []
    starts = [0]
    stack = 1
    for eq in S.equations:
        for side in (eq.left, eq.right):
            stack = max(stack, _compile(side, B, var_index, fn_index, code))
            starts.append(len(code))
    tables, offsets, arities = B.flat
    indices = kernels.solve_points(k, n, tables, offsets, arities, code, starts, stack)
    points = [_unrank(i, k, n) for i in indices]
    return AlgebraicSet(B, S.variables, tuple(points), S)


def _unrank(idx: int, k: int, n: int) -> tuple[int, ...]:
    out = [0] * n
    for pos in range(n - 1, -1, -1):
        idx, out[pos] = divmod(idx, k)
    return tuple(out)


def full_space(B, variables: Sequence[str], sig: Signature | None = None) -> AlgebraicSet:
    B = _as_algebra(B)
    return solve(EquationSystem(sig or B.sig, tuple(variables)), B)


# ---------------------------------------------------------------------------
# radicals and coordinate algebras


class TraceSubalgebra:
    """Term functions on a non-empty solution set Y, each with a witness term.

    ``functions[i]`` lists the values of element ``i`` at the points of Y (in
    the order of ``Y.points``).  Elements are numbered in discovery order:
    projections first, then constant functions, then closure rounds.
    """

    def __init__(self, Y: AlgebraicSet, bound: int | None = None):
        if Y.is_empty():
            raise EmptyVarietyError("the solution set is empty")
        B = Y.algebra
        self.Y = Y
        self.functions: list[tuple[int, ...]] = []
        self.witnesses: list[Term] = []
        self._index: dict[tuple[int, ...], int] = {}
        pts = Y.points
        self.projections = tuple(self._insert(tuple(p[i] for p in pts), Var(v)) for i, v in enumerate(Y.variables))
        for c in B.sig.constants:
            val = B.constant(c)
            self._insert((val,) * len(pts), Const(c))
        m = len(pts)
        tables: dict[str, dict[tuple[int, ...], int]] = {fn: {} for fn, _ in B.sig.functions}
        old = 0
        while old < len(self.functions):
            cur = len(self.functions)
            for fn, arity in B.sig.functions:
                table = B.table(fn)
                k = B.size
                for args in _tuples_touching(old, cur, arity):
                    vals = []
                    for p in range(m):
                        idx = 0
                        for a in args:
                            idx = idx * k + self.functions[a][p]
                        vals.append(table[idx])
                    f = tuple(vals)
                    pos = self._index.get(f)
                    if pos is None:
                        pos = self._insert(f, App(fn, tuple(self.witnesses[a] for a in args)))
                        check_bound(len(self.functions), "trace subalgebra", bound)
                    tables[fn][args] = pos
            old = cur
        size = len(self.functions)
        flat = {fn: [tables[fn][args] for args in itertools.product(range(size), repeat=arity)]
                for fn, arity in B.sig.functions}
        consts = {c: self._index[(B.constant(c),) * m] for c in B.sig.constants}
        self.algebra = FiniteAlgebra(B.sig, size, flat, consts, "coordinate algebra")

    def _insert(self, f: tuple[int, ...], witness: Term) -> int:
        pos = self._index.get(f)
        if pos is None:
            pos = len(self.functions)
            self._index[f] = pos
            self.functions.append(f)
            self.witnesses.append(witness)
        return pos

    def __len__(self):
        return len(self.functions)

    def index_of_function(self, f: Sequence[int]) -> int | None:
        return self._index.get(tuple(f))

    def trace(self, t: Term) -> int:
        """Element of the trace subalgebra represented by ``t``, computed through the tables."""
        if isinstance(t, Var):
            try:
                return self.projections[self.Y.variables.index(t.name)]
            except ValueError:
                raise EvaluationError(f"variable {t.name!r} is not a coordinate") from None
        if isinstance(t, Const):
            return self.algebra.constant(t.name)
        return self.algebra.apply(t.fn, [self.trace(a) for a in t.args])

    def equalizer(self, i: int, j: int) -> tuple[tuple[int, ...], ...]:
        fi, fj = self.functions[i], self.functions[j]
        return tuple(p for p, a, b in zip(self.Y.points, fi, fj) if a == b)


def _tuples_touching(old: int, cur: int, arity: int):
    """Argument tuples over ``range(cur)`` with at least one entry in ``range(old, cur)``."""
    for first in range(arity):
        pools = [range(old)] * first + [range(old, cur)] + [range(cur)] * (arity - first - 1)
        yield from itertools.product(*pools)


def trace_subalgebra(Y: AlgebraicSet, bound: int | None = None) -> TraceSubalgebra:
    return TraceSubalgebra(Y, bound)


def coordinate_algebra(Y: AlgebraicSet) -> tuple[FiniteAlgebra, tuple[int, ...]]:
    """The coordinate algebra of Y and the elements represented by the coordinate variables."""
    T = TraceSubalgebra(Y)
    return T.algebra, T.projections


def radical_member(Y: AlgebraicSet, q: AtomicFormula, method: str = "trace") -> bool:
    """Whether ``q`` holds at every point of ``Y`` (always true on the empty set).

    An inequation holds when its sides differ at every point.
    """
    check_term(q.left, Y.algebra.sig, Y.variables)
    check_term(q.right, Y.algebra.sig, Y.variables)
    if Y.is_empty():
        return True
    if method == "trace":
        T = TraceSubalgebra(Y)
        pairs = zip(T.functions[T.trace(q.left)], T.functions[T.trace(q.right)])
    elif method == "points":
        pairs = ((eval_term(q.left, Y.algebra, Y.assignment(p)), eval_term(q.right, Y.algebra, Y.assignment(p)))
                 for p in Y.points)
    else:
        raise ValueError(f"unknown method {method!r}")
    return all((a == b) != q.negated for a, b in pairs)


# ---------------------------------------------------------------------------
# irreducibility and decomposition


@dataclass(frozen=True)
class Irreducibility:
    irreducible: bool
    generic_point: tuple[int, ...] | None = None
    # proper equalizers covering Y when reducible: (equation, points)
    cover: tuple[tuple[AtomicFormula, tuple[tuple[int, ...], ...]], ...] = ()

    def __bool__(self):
        return self.irreducible


def is_irreducible(Y: AlgebraicSet, T: TraceSubalgebra | None = None) -> Irreducibility:
    """Decide irreducibility; a generic point is one where all term functions take distinct values."""
    T = T or TraceSubalgebra(Y)
    m = len(T)
    for pos, p in enumerate(Y.points):
        if len({f[pos] for f in T.functions}) == m:
            return Irreducibility(True, p)
    cover = []
    covered: set[int] = set()
    for pos in range(len(Y.points)):
        if pos in covered:
            continue
        seen: dict[int, int] = {}
        for i, f in enumerate(T.functions):
            j = seen.setdefault(f[pos], i)
            if j != i:
                eq = AtomicFormula(T.witnesses[j], T.witnesses[i])
                pts = T.equalizer(j, i)
                cover.append((eq, pts))
                covered.update(idx for idx, q in enumerate(Y.points) if q in set(pts))
                break
    return Irreducibility(False, None, tuple(cover))


def _sub_system(Y: AlgebraicSet, eq: AtomicFormula) -> EquationSystem | None:
    return Y.system.extended([eq]) if Y.system is not None else None


def maximal_equalizers(Y: AlgebraicSet, T: TraceSubalgebra | None = None) -> list[AlgebraicSet]:
    """The inclusion-maximal proper equalizer subsets of Y, each with its augmented system."""
    T = T or TraceSubalgebra(Y)
    best: dict[frozenset, AtomicFormula] = {}
    for i, j in itertools.combinations(range(len(T)), 2):
        pts = frozenset(T.equalizer(i, j))
        if pts and pts not in best:
            best[pts] = AtomicFormula(T.witnesses[i], T.witnesses[j])
    keys = [s for s in best if not any(s < other for other in best)]
    keys.sort(key=lambda s: sorted(s))
    return [AlgebraicSet(Y.algebra, Y.variables, tuple(s), _sub_system(Y, best[s])) for s in keys]


def _antichain(sets: Iterable[AlgebraicSet]) -> list[AlgebraicSet]:
    unique: dict[frozenset, AlgebraicSet] = {}
    for s in sets:
        unique.setdefault(s.point_set, s)
    keep = [s for key, s in unique.items() if not any(key < other for other in unique)]
    keep.sort(key=lambda s: s.points)
    return keep


def decompose(Y, order: str = "forward") -> list[AlgebraicSet]:
    """Irreducible components of Y (or of every component of a closed set), canonically sorted.

    ``order`` only changes the order in which maximal equalizers are explored,
    so two runs with different orders must agree.
    """
    if order not in ("forward", "reverse"):
        raise ValueError(f"unknown order {order!r}")
    if isinstance(Y, ClosedSet):
        return _antichain(c for comp in Y.components for c in decompose(comp, order))
    if Y.is_empty():
        return []
    memo: dict[frozenset, list[AlgebraicSet]] = {}

    def go(Z: AlgebraicSet) -> list[AlgebraicSet]:
        key = Z.point_set
        if key in memo:
            return memo[key]
        T = TraceSubalgebra(Z)
        if is_irreducible(Z, T):
            out = [Z]
        else:
            parts = maximal_equalizers(Z, T)
            if order == "reverse":
                parts.reverse()
            out = _antichain(c for part in parts for c in go(part))
        memo[key] = out
        return out

    return go(Y)


@dataclass(frozen=True)
class ClosedSet:
    """A finite union of algebraic sets in the same ``B^n``, stored as an antichain."""

    algebra: FiniteAlgebra
    variables: tuple[str, ...]
    components: tuple[AlgebraicSet, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        for c in self.components:
            if c.algebra != self.algebra or c.variables != self.variables:
                raise ValueError("components live in different spaces")
        object.__setattr__(self, "components", tuple(_antichain(self.components)))

    @classmethod
    def of(cls, *sets: AlgebraicSet) -> ClosedSet:
        if not sets:
            raise ValueError("need at least one algebraic set to fix the ambient space")
        return cls(sets[0].algebra, sets[0].variables, tuple(s for s in sets if not s.is_empty()))

    @property
    def points(self) -> tuple[tuple[int, ...], ...]:
        return tuple(sorted(set().union(*(c.point_set for c in self.components))))


def _same_space(a: ClosedSet, b: ClosedSet) -> None:
    if a.algebra != b.algebra or len(a.variables) != len(b.variables):
        raise ValueError("closed sets live in different spaces")


def closed_union(a: ClosedSet, b: ClosedSet) -> ClosedSet:
    _same_space(a, b)
    return ClosedSet(a.algebra, a.variables, a.components + b.components)


def closed_intersection(a: ClosedSet, b: ClosedSet) -> ClosedSet:
    """Componentwise intersections, each realised by the union of the two defining systems."""
    _same_space(a, b)
    parts = []
    for x in a.components:
        for y in b.components:
            if x.system is not None and y.system is not None:
                Z = solve(x.system.extended(y.system.equations), a.algebra)
            else:
                Z = AlgebraicSet(a.algebra, a.variables, tuple(x.point_set & y.point_set))
            if not Z.is_empty():
                parts.append(Z)
    return ClosedSet(a.algebra, a.variables, tuple(parts))


def noetherian_chain_probe(B, systems: Sequence[EquationSystem]) -> int:
    """Least (1-based) index after which the solution sets of a growing chain stay the same."""
    if not systems:
        raise ValueError("empty chain")
    sets = [solve(S, B).points for S in systems]
    idx = len(sets)
    while idx > 1 and sets[idx - 2] == sets[-1]:
        idx -= 1
    return idx
