"""Presentations by generators and relations, and ground congruence closure.

The least congruent set generated by a set of equations is infinite, so it
is never built.  Membership of a single equation is decided on the finite
subterm-closed universe of the relations and the query, where variables act
as free constants; the closure rules have no substitution step, so this is
exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from ._config import check_bound
from .algebra import FiniteAlgebra, generated_subalgebra
from .errors import EvaluationError, SignatureError
from .syntax import App, AtomicFormula, Const, Signature, Term, Var, check_term, enumerate_terms


@dataclass(frozen=True)
class Presentation:
    sig: Signature
    variables: tuple[str, ...]
    relations: tuple[AtomicFormula, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "relations", tuple(self.relations))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("repeated generator")
        for r in self.relations:
            if r.negated:
                raise ValueError(f"defining relations are equations, got {r}")
            check_term(r.left, self.sig, self.variables)
            check_term(r.right, self.sig, self.variables)

    def max_depth(self) -> int:
        return max((r.depth() for r in self.relations), default=0)


class CongruentClosure:
    """Incremental congruence closure over a growing set of ground terms.

    Terms are hash-consed into nodes; classes live in a union-find, each class
    keeps the nodes that use it as an argument, and a signature table finds
    applications whose arguments became equal.
    """

    def __init__(self, sig: Signature, variables: Sequence[str]):
        self.sig = sig
        self.variables = tuple(variables)
        self._node: dict[Term, int] = {}
        self._terms: list[Term] = []
        self._parent: list[int] = []
        self._size: list[int] = []
        self._uses: list[list[int]] = []
        self._args: list[tuple[int, ...]] = []
        self._sym: list[str] = []
        self._signatures: dict[tuple, int] = {}

    def __len__(self):
        return len(self._terms)

    def find(self, a: int) -> int:
        root = a
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[a] != root:
            self._parent[a], a = root, self._parent[a]
        return root

    def add(self, t: Term) -> int:
        """Node id of ``t``, inserting it and its subterms when new."""
        if t in self._node:
            return self._node[t]
        if isinstance(t, Var):
            if t.name not in self.variables:
                raise EvaluationError(f"variable {t.name!r} is not a generator")
            args: tuple[int, ...] = ()
            sym = "$" + t.name
        elif isinstance(t, Const):
            if not self.sig.has_constant(t.name):
                raise SignatureError(f"unknown constant {t.name!r}")
            args, sym = (), t.name
        else:
            args = tuple(self.add(a) for a in t.args)
            sym = t.fn
        nid = len(self._terms)
        self._node[t] = nid
        self._terms.append(t)
        self._parent.append(nid)
        self._size.append(1)
        self._uses.append([])
        self._args.append(args)
        self._sym.append(sym)
        for a in set(self.find(a) for a in args):
            self._uses[a].append(nid)
        if args:
            key = (sym, tuple(self.find(a) for a in args))
            other = self._signatures.get(key)
            if other is None:
                self._signatures[key] = nid
            else:
                self._merge(nid, other)
        return nid

    def _merge(self, a: int, b: int) -> None:
        pending = [(a, b)]
        while pending:
            x, y = pending.pop()
            rx, ry = self.find(x), self.find(y)
            if rx == ry:
                continue
            if (self._size[rx], -rx) > (self._size[ry], -ry):
                rx, ry = ry, rx
            # rx is absorbed into ry
            self._parent[rx] = ry
            self._size[ry] += self._size[rx]
            moved, self._uses[rx] = self._uses[rx], []
            for u in moved:
                key = (self._sym[u], tuple(self.find(c) for c in self._args[u]))
                other = self._signatures.get(key)
                if other is None:
                    self._signatures[key] = u
                elif self.find(other) != self.find(u):
                    pending.append((u, other))
            self._uses[ry].extend(moved)

    def assert_equal(self, left: Term, right: Term) -> None:
        self._merge(self.add(left), self.add(right))

    def equivalent(self, left: Term, right: Term) -> bool:
        return self.find(self.add(left)) == self.find(self.add(right))

    def classes(self) -> list[list[Term]]:
        groups: dict[int, list[Term]] = {}
        for nid, t in enumerate(self._terms):
            groups.setdefault(self.find(nid), []).append(t)
        return sorted((sorted(g, key=str) for g in groups.values()), key=lambda g: str(g[0]))

    @classmethod
    def of(cls, P: Presentation) -> CongruentClosure:
        cc = cls(P.sig, P.variables)
        for r in P.relations:
            cc.assert_equal(r.left, r.right)
        return cc


def congruent_closure_query(
    P: Presentation, q: AtomicFormula, depth_bound: int | None = None, extend: bool = False
) -> bool:
    """Whether the equation ``q`` lies in the congruent closure of the relations of ``P``.

    With ``extend=True`` every term of depth at most ``depth_bound`` over the
    generators is added to the universe first; the answer does not change.
    """
    if q.negated:
        raise ValueError("queries are equations")
    check_term(q.left, P.sig, P.variables)
    check_term(q.right, P.sig, P.variables)
    needed = max(P.max_depth(), q.depth())
    if depth_bound is not None and depth_bound < needed:
        raise ValueError(f"depth bound {depth_bound} is below the depth {needed} of the input")
    cc = CongruentClosure.of(P)
    if extend:
        universe = enumerate_terms(P.sig, P.variables, needed if depth_bound is None else depth_bound)
        check_bound(len(universe), "term universe")
        for t in universe:
            cc.add(t)
    return cc.equivalent(q.left, q.right)


def generator_names(C: FiniteAlgebra) -> list[str]:
    stem = "x"
    while any(f"{stem}{m}" in C.sig for m in range(C.size)):
        stem = "_" + stem
    return [f"{stem}{m}" for m in range(C.size)]


def table_presentation(C: FiniteAlgebra, generators: Iterable[int] | None = None) -> Presentation:
    """One generator per element and one relation per table entry and constant."""
    gens = list(range(C.size)) if generators is None else list(generators)
    if set(generated_subalgebra(C, gens).elements) != set(range(C.size)):
        raise ValueError("the given elements do not generate the algebra")
    names = generator_names(C)
    x = [Var(n) for n in names]
    rels = []
    for fn, arity in C.sig.functions:
        for args in itertools.product(range(C.size), repeat=arity):
            rels.append(AtomicFormula(App(fn, tuple(x[a] for a in args)), x[C.apply(fn, args)]))
    for c in C.sig.constants:
        rels.append(AtomicFormula(Const(c), x[C.constant(c)]))
    return Presentation(C.sig, tuple(names), tuple(rels))


def realize_presentation_in(P: Presentation, B) -> list[dict[str, int]]:
    """Every assignment of the generators in ``B`` satisfying all relations."""
    from .geometry import EquationSystem, solve

    Y = solve(EquationSystem(P.sig, P.variables, P.relations), B)
    return [dict(zip(P.variables, p)) for p in Y.points]
