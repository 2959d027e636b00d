"""Slow reference implementations used to cross-check the main algorithms.

Nothing here shares code paths with the modules it checks beyond term
evaluation: solution sets are enumerated point by point, homomorphisms are
filtered from all maps, congruent closure is saturated globally, and
irreducibility is decided through Zariski closures of single points.
"""

from __future__ import annotations

import itertools
from typing import Sequence

from .syntax import App, AtomicFormula, Term, enumerate_terms, eval_term


def solve_points(equations: Sequence[AtomicFormula], variables: Sequence[str], B) -> list[tuple[int, ...]]:
    out = []
    for p in itertools.product(range(B.size), repeat=len(variables)):
        point = dict(zip(variables, p))
        if all(eval_term(e.left, B, point) == eval_term(e.right, B, point) for e in equations):
            out.append(p)
    return out


def table_commutes(mapping: Sequence[int], C, B) -> bool:
    for c in C.sig.constants:
        if mapping[C.constant(c)] != B.constant(c):
            return False
    for fn, arity in C.sig.functions:
        for args in itertools.product(range(C.size), repeat=arity):
            if mapping[C.apply(fn, args)] != B.apply(fn, [mapping[a] for a in args]):
                return False
    return True


def all_homomorphisms(C, B) -> list[tuple[int, ...]]:
    return [m for m in itertools.product(range(B.size), repeat=C.size) if table_commutes(m, C, B)]


def saturate(relations: Sequence[AtomicFormula], universe: Sequence[Term]) -> dict[Term, int]:
    """Least relation on ``universe`` closed under the four congruent-set rules, as class labels.

    Reflexivity, symmetry and transitivity are enforced by taking connected
    components of the edge set; compatibility adds an edge between
    ``F(t1..tn)`` and ``F(s1..sn)`` whenever all ``ti``, ``si`` are related.
    Rounds repeat until no edge is added.
    """
    index = {t: i for i, t in enumerate(universe)}
    n = len(universe)
    edges: set[tuple[int, int]] = set()
    for r in relations:
        edges.add((index[r.left], index[r.right]))
    apps = [(i, t) for i, t in enumerate(universe) if isinstance(t, App)]
    while True:
        label = _components(n, edges)
        groups: dict[tuple, list[int]] = {}
        for i, t in apps:
            groups.setdefault((t.fn, tuple(label[index[a]] for a in t.args)), []).append(i)
        fresh = set()
        for members in groups.values():
            for a, b in zip(members, members[1:]):
                if label[a] != label[b]:
                    fresh.add((a, b))
        if not fresh:
            return {t: label[i] for i, t in enumerate(universe)}
        edges |= fresh


def _components(n: int, edges) -> list[int]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    label = [-1] * n
    for start in range(n):
        if label[start] >= 0:
            continue
        label[start] = start
        stack = [start]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if label[w] < 0:
                    label[w] = start
                    stack.append(w)
    return label


def saturation_universe(sig, variables, depth: int = 3) -> list[Term]:
    return enumerate_terms(sig, variables, depth)


def in_closure_of_point(B, p: Sequence[int], q: Sequence[int]) -> bool:
    """Whether every equation true at ``p`` is true at ``q`` (q lies in the closure of {p}).

    Equivalent to: the subalgebra of ``B x B`` generated by the pairs
    ``(p_i, q_i)`` and the constants is the graph of a function.
    """
    pairs = set(zip(p, q)) | {(B.constant(c), B.constant(c)) for c in B.sig.constants}
    frontier = list(pairs)
    while frontier:
        new = []
        for fn, arity in B.sig.functions:
            for args in itertools.product(list(pairs), repeat=arity):
                pair = (B.apply(fn, [a for a, _ in args]), B.apply(fn, [b for _, b in args]))
                if pair not in pairs:
                    pairs.add(pair)
                    new.append(pair)
        frontier = new
    left: dict[int, int] = {}
    for a, b in pairs:
        if left.setdefault(a, b) != b:
            return False
    return True


def irreducible_by_points(B, points: Sequence[Sequence[int]]) -> bool:
    """A finite point set is irreducible iff some point has all the others in its closure."""
    return any(all(in_closure_of_point(B, p, q) for q in points) for p in points)


def term_value_vector(t: Term, variables: Sequence[str], B, points) -> tuple[int, ...]:
    return tuple(eval_term(t, B, dict(zip(variables, p))) for p in points)

