"""Finite algebras given by operation tables over ``{0, ..., k-1}``.

Tables are stored row-major: the entry of ``F(a1, ..., an)`` sits at index
``a1*k^(n-1) + ... + an``.  Every construction returns canonically ordered
results (classes labelled by least member, lexicographic tuples, row-major
product indexing) so outputs can be compared bit for bit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from . import kernels
from ._config import check_bound
from .errors import InvalidSystem, NotACongruence, SignatureError
from .syntax import App, AtomicFormula, Const, Signature, Term, Var, eval_term


class FiniteAlgebra:
    """An algebra over ``sig`` with universe ``range(size)``."""

    __slots__ = ("sig", "size", "name", "_tables", "_constants", "__dict__")

    def __init__(
        self,
        sig: Signature,
        size: int,
        tables: Mapping[str, Sequence[int]] | None = None,
        constants: Mapping[str, int] | None = None,
        name: str = "",
    ):
        tables = dict(tables or {})
        constants = dict(constants or {})
        if size < 1:
            raise ValueError("an algebra needs a non-empty universe")
        self.sig = sig
        self.size = int(size)
        self.name = name
        self._tables: dict[str, tuple[int, ...]] = {}
        for fn, arity in sig.functions:
            if fn not in tables:
                raise ValueError(f"missing table for {fn!r}")
            table = tuple(int(v) for v in tables.pop(fn))
            if len(table) != size**arity:
                raise ValueError(f"table for {fn!r} has {len(table)} entries, expected {size ** arity}")
            if any(v < 0 or v >= size for v in table):
                raise ValueError(f"table for {fn!r} has values outside 0..{size - 1}")
            self._tables[fn] = table
        if tables:
            raise ValueError(f"tables given for unknown symbols {sorted(tables)}")
        self._constants: dict[str, int] = {}
        for c in sig.constants:
            if c not in constants:
                raise ValueError(f"missing interpretation of constant {c!r}")
            v = int(constants.pop(c))
            if not 0 <= v < size:
                raise ValueError(f"constant {c!r} interpreted outside the universe")
            self._constants[c] = v
        if constants:
            raise ValueError(f"constants given for unknown symbols {sorted(constants)}")

    # -- access
    @property
    def elements(self) -> range:
        return range(self.size)

    def table(self, fn: str) -> tuple[int, ...]:
        return self._tables[fn]

    @property
    def tables(self) -> dict[str, tuple[int, ...]]:
        return dict(self._tables)

    @property
    def constants(self) -> dict[str, int]:
        return dict(self._constants)

    def constant(self, name: str) -> int:
        try:
            return self._constants[name]
        except KeyError:
            raise SignatureError(f"unknown constant {name!r}") from None

    def apply(self, fn: str, args: Sequence[int]) -> int:
        idx = 0
        k = self.size
        for a in args:
            idx = idx * k + a
        return self._tables[fn][idx]

    @cached_property
    def flat(self) -> tuple[list[int], list[int], list[int]]:
        """(concatenated tables, offsets, arities) in declaration order, for the kernels."""
        flat, offsets, arities = [], [], []
        for fn, arity in self.sig.functions:
            offsets.append(len(flat))
            arities.append(arity)
            flat.extend(self._tables[fn])
        return flat, offsets, arities

    def key(self):
        return (self.sig, self.size, tuple(self._tables[f] for f, _ in self.sig.functions),
                tuple(self._constants[c] for c in self.sig.constants))

    def __eq__(self, other):
        return isinstance(other, FiniteAlgebra) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        label = self.name or "FiniteAlgebra"
        return f"<{label}: size {self.size}, {', '.join(self.sig.symbols) or 'no symbols'}>"

    # -- derived algebras
    def renamed(self, name: str) -> FiniteAlgebra:
        return FiniteAlgebra(self.sig, self.size, self._tables, self._constants, name)

    def reduct(self, sig: Signature) -> FiniteAlgebra:
        if not sig.is_reduct_of(self.sig):
            raise SignatureError("not a reduct of the algebra's signature")
        return FiniteAlgebra(
            sig, self.size,
            {f: self._tables[f] for f, _ in sig.functions},
            {c: self._constants[c] for c in sig.constants},
            self.name,
        )

    def with_constants(self, extra: Mapping[str, int], name: str | None = None) -> FiniteAlgebra:
        sig = self.sig.expand(tuple(extra))
        consts = dict(self._constants)
        consts.update(extra)
        return FiniteAlgebra(sig, self.size, self._tables, consts, self.name if name is None else name)

    def relabel(self, elements: Sequence[int], name: str = "") -> FiniteAlgebra:
        """The subalgebra on ``elements`` (which must be closed), renumbered in the given order."""
        index = {m: i for i, m in enumerate(elements)}
        tables = {}
        for fn, arity in self.sig.functions:
            try:
                tables[fn] = [index[self.apply(fn, args)] for args in itertools.product(elements, repeat=arity)]
            except KeyError:
                raise ValueError("element set is not closed under the operations") from None
        try:
            consts = {c: index[v] for c, v in self._constants.items()}
        except KeyError:
            raise ValueError("element set misses a constant") from None
        return FiniteAlgebra(self.sig, len(elements), tables, consts, name)

    def to_json(self) -> dict:
        return {
            "signature": signature_to_json(self.sig),
            "size": self.size,
            "tables": {f: list(t) for f, t in self._tables.items()},
            "constants": dict(self._constants),
        }


def signature_to_json(sig: Signature) -> dict:
    return {"functions": [[n, a] for n, a in sig.functions], "constants": list(sig.constants)}


def trivial_algebra(sig: Signature, name: str = "E") -> FiniteAlgebra:
    """The one-element algebra E over ``sig``."""
    return FiniteAlgebra(sig, 1, {f: [0] for f, _ in sig.functions}, {c: 0 for c in sig.constants}, name)


def _require_same_signature(a: FiniteAlgebra, b: FiniteAlgebra) -> None:
    if a.sig != b.sig:
        raise SignatureError("algebras have different signatures")


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True)
class Homomorphism:
    source: FiniteAlgebra
    target: FiniteAlgebra
    map: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "map", tuple(self.map))

    def __call__(self, m: int) -> int:
        return self.map[m]

    def is_valid(self) -> bool:
        return is_homomorphism(self.map, self.source, self.target)

    def is_injective(self) -> bool:
        return len(set(self.map)) == len(self.map)

    def is_surjective(self) -> bool:
        return len(set(self.map)) == self.target.size

    def image(self) -> list[int]:
        return sorted(set(self.map))

    def compose(self, after: Homomorphism) -> Homomorphism:
        """``after ∘ self``."""
        return Homomorphism(self.source, after.target, tuple(after.map[v] for v in self.map))


def is_homomorphism(mapping: Sequence[int], source: FiniteAlgebra, target: FiniteAlgebra) -> bool:
    _require_same_signature(source, target)
    if len(mapping) != source.size or any(not 0 <= v < target.size for v in mapping):
        return False
    for c in source.sig.constants:
        if mapping[source.constant(c)] != target.constant(c):
            return False
    sflat, soff, arities = source.flat
    tflat, toff, _ = target.flat
    return kernels.check_homomorphism(list(mapping), source.size, target.size, sflat, tflat, soff, toff, arities)


@dataclass(frozen=True)
class Subuniverse:
    """Result of subalgebra generation: elements plus a witnessing term for each."""

    elements: tuple[int, ...]
    witness: dict = field(hash=False, compare=False)
    # element -> (symbol, argument elements) or ("var", variable name)
    derivation: dict = field(hash=False, compare=False, repr=False)


def generated_subalgebra(
    B: FiniteAlgebra, seed: Iterable[int], names: Mapping[int, str] | None = None
) -> Subuniverse:
    """Least subuniverse containing ``seed`` and every constant.

    Each round applies the symbols in declaration order (functions, then
    constants) to the elements found so far; the first derivation found for
    an element is kept as its witness term over the seed variables.
    """
    seed = list(dict.fromkeys(int(m) for m in seed))
    if not seed and not B.sig.constants:
        raise ValueError("empty seed over a constant-free signature generates the empty set")
    for m in seed:
        if not 0 <= m < B.size:
            raise ValueError(f"seed element {m} is outside the universe")
    names = dict(names or {})
    witness: dict[int, Term] = {}
    derivation: dict[int, tuple] = {}
    for m in seed:
        v = names.get(m, f"x{m}")
        witness[m] = Var(v)
        derivation[m] = ("var", v)
    found = list(seed)
    changed = True
    while changed:
        changed = False
        current = list(found)
        for fn, arity in B.sig.functions:
            for args in itertools.product(current, repeat=arity):
                val = B.apply(fn, args)
                if val not in witness:
                    witness[val] = App(fn, tuple(witness[a] for a in args))
                    derivation[val] = (fn, args)
                    found.append(val)
                    changed = True
        for c in B.sig.constants:
            val = B.constant(c)
            if val not in witness:
                witness[val] = Const(c)
                derivation[val] = (c, ())
                found.append(val)
                changed = True
    return Subuniverse(tuple(sorted(found)), witness, derivation)


def generating_set(C: FiniteAlgebra) -> list[int]:
    """A small generating set, chosen greedily by least missing element."""
    gens: list[int] = []
    covered: set[int] = set(generated_subalgebra(C, []).elements) if C.sig.constants else set()
    while len(covered) < C.size:
        m = min(set(range(C.size)) - covered)
        gens.append(m)
        covered = set(generated_subalgebra(C, gens).elements)
    return gens


def _extension_plan(C: FiniteAlgebra, gens: Sequence[int]):
    sub = generated_subalgebra(C, gens)
    order = []
    seen = set()
    # derivations only refer to elements found earlier, so list them in discovery order
    pending = [m for m in sub.derivation]
    for m in pending:
        order.append((m, sub.derivation[m]))
        seen.add(m)
    return order


def enumerate_homomorphisms(C, B, mode: str = "all") -> list[Homomorphism]:
    """All homomorphisms ``C -> B`` in lexicographic order of their maps.

    ``C`` and ``B`` may be :class:`CoefficientStructure` instances, in which
    case only A-homomorphisms (those fixing the coefficient copy of A) are
    returned; ``mode="fixing"`` insists on that.  ``mode="injective"`` keeps
    the embeddings only.
    """
    if mode not in ("all", "injective", "fixing", "fixing-injective"):
        raise ValueError(f"unknown mode {mode!r}")
    coeff = isinstance(C, CoefficientStructure) or isinstance(B, CoefficientStructure)
    if coeff or mode.startswith("fixing"):
        if not (isinstance(C, CoefficientStructure) and isinstance(B, CoefficientStructure)):
            raise SignatureError("A-homomorphisms need coefficient structures on both sides")
        if C.A != B.A:
            raise SignatureError("coefficient structures over different algebras")
        src, tgt = C.expand(), B.expand()
        injective = mode in ("injective", "fixing-injective")
        homs = _enumerate(src, tgt, injective)
        return [Homomorphism(C.B, B.B, h.map) for h in homs]
    return _enumerate(C, B, mode == "injective")


def _enumerate(C: FiniteAlgebra, B: FiniteAlgebra, injective: bool) -> list[Homomorphism]:
    _require_same_signature(C, B)
    if injective and C.size > B.size:
        return []
    gens = generating_set(C)
    plan = _extension_plan(C, gens)
    out = []
    for images in itertools.product(range(B.size), repeat=len(gens)):
        assign = dict(zip(gens, images))
        h = [None] * C.size
        ok = True
        for m, (sym, args) in plan:
            if sym == "var":
                val = assign[m]
            elif args:
                val = B.apply(sym, [h[a] for a in args])
            else:
                val = B.constant(sym)
            h[m] = val
        if injective and len(set(h)) != len(h):
            continue
        if ok and is_homomorphism(h, C, B):
            out.append(Homomorphism(C, B, tuple(h)))
    out.sort(key=lambda hm: hm.map)
    return out


def find_isomorphism(C: FiniteAlgebra, B: FiniteAlgebra) -> Homomorphism | None:
    """A bijective homomorphism ``C -> B`` (the lexicographically least), or None."""
    _require_same_signature(C, B)
    if C.size != B.size:
        return None
    embeddings = _enumerate(C, B, injective=True)
    return embeddings[0] if embeddings else None


def image_subalgebra(h: Homomorphism) -> FiniteAlgebra:
    return h.target.relabel(h.image())


# ---------------------------------------------------------------------------
# congruences


class Congruence:
    """A partition of the universe, stored as least-member labels."""

    __slots__ = ("algebra", "labels")

    def __init__(self, algebra: FiniteAlgebra, labels: Sequence[int]):
        if len(labels) != algebra.size:
            raise ValueError("partition does not cover the universe")
        self.algebra = algebra
        self.labels = _canonical_labels(labels)

    @classmethod
    def from_classes(cls, algebra: FiniteAlgebra, classes: Iterable[Iterable[int]]) -> Congruence:
        labels = [None] * algebra.size
        for block in classes:
            block = list(block)
            for m in block:
                if labels[m] is not None:
                    raise ValueError(f"element {m} lies in two classes")
                labels[m] = min(block)
        if None in labels:
            raise ValueError("classes do not cover the universe")
        return cls(algebra, labels)

    @classmethod
    def identity(cls, algebra: FiniteAlgebra) -> Congruence:
        return cls(algebra, range(algebra.size))

    @classmethod
    def total(cls, algebra: FiniteAlgebra) -> Congruence:
        return cls(algebra, [0] * algebra.size)

    @classmethod
    def generated(cls, algebra: FiniteAlgebra, pairs: Iterable[tuple[int, int]]) -> Congruence:
        uf = _UnionFind(algebra.size)
        for a, b in pairs:
            uf.union(a, b)
        return cls(algebra, _compatibility_closure(algebra, uf))

    def classes(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for m, lab in enumerate(self.labels):
            out.setdefault(lab, []).append(m)
        return [out[k] for k in sorted(out)]

    def related(self, a: int, b: int) -> bool:
        return self.labels[a] == self.labels[b]

    def is_compatible(self) -> bool:
        return _first_incompatibility(self.algebra, self.labels) is None

    def __le__(self, other: Congruence) -> bool:
        # every element must share an ``other`` class with the least member of its class
        return all(other.labels[a] == other.labels[lab] for a, lab in enumerate(self.labels))

    def __eq__(self, other):
        return isinstance(other, Congruence) and self.algebra == other.algebra and self.labels == other.labels

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        return f"Congruence({self.classes()})"


def _canonical_labels(labels: Sequence[int]) -> tuple[int, ...]:
    first: dict[int, int] = {}
    for m, lab in enumerate(labels):
        first.setdefault(lab, m)
    return tuple(first[lab] for lab in labels)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra < rb:
            ra, rb = rb, ra
        self.parent[ra] = rb
        return True

    def labels(self) -> list[int]:
        return [self.find(a) for a in range(len(self.parent))]


def _first_incompatibility(algebra: FiniteAlgebra, labels: Sequence[int]):
    """A witness ``(fn, args, position, replacement)`` breaking compatibility, or None."""
    k = algebra.size
    for fn, arity in algebra.sig.functions:
        for args in itertools.product(range(k), repeat=arity):
            val = labels[algebra.apply(fn, args)]
            for pos in range(arity):
                for m2 in range(k):
                    if m2 != args[pos] and labels[m2] == labels[args[pos]]:
                        alt = list(args)
                        alt[pos] = m2
                        if labels[algebra.apply(fn, alt)] != val:
                            return fn, args, pos, m2
    return None


def _compatibility_closure(algebra: FiniteAlgebra, uf: _UnionFind) -> list[int]:
    """Alternate transitive closure (union-find) with compatibility steps until stable."""
    k = algebra.size
    changed = True
    while changed:
        changed = False
        for fn, arity in algebra.sig.functions:
            for args in itertools.product(range(k), repeat=arity):
                val = algebra.apply(fn, args)
                for pos in range(arity):
                    root = uf.find(args[pos])
                    for m2 in range(k):
                        if m2 != args[pos] and uf.find(m2) == root:
                            alt = list(args)
                            alt[pos] = m2
                            if uf.union(val, algebra.apply(fn, alt)):
                                changed = True
    return uf.labels()


def congruence_lattice_op(kind: str, theta1: Congruence, theta2: Congruence) -> Congruence:
    if theta1.algebra != theta2.algebra:
        raise ValueError("congruences live on different algebras")
    alg = theta1.algebra
    if kind == "meet":
        pairs = {}
        labels = []
        for m in range(alg.size):
            key = (theta1.labels[m], theta2.labels[m])
            labels.append(pairs.setdefault(key, m))
        return Congruence(alg, labels)
    if kind == "join":
        uf = _UnionFind(alg.size)
        for theta in (theta1, theta2):
            for m, lab in enumerate(theta.labels):
                uf.union(m, lab)
        return Congruence(alg, _compatibility_closure(alg, uf))
    raise ValueError(f"unknown lattice operation {kind!r}")


def kernel(h: Homomorphism) -> Congruence:
    return Congruence(h.source, h.map)


def quotient(B: FiniteAlgebra, theta: Congruence, name: str = "") -> tuple[FiniteAlgebra, Homomorphism]:
    """``B/theta`` with classes numbered by least member, and the canonical epimorphism."""
    if theta.algebra != B:
        raise ValueError("congruence belongs to another algebra")
    bad = _first_incompatibility(B, theta.labels)
    if bad is not None:
        fn, args, pos, m2 = bad
        raise NotACongruence(f"partition is not compatible with {fn!r} at {args} (position {pos} -> {m2})")
    reps = sorted(set(theta.labels))
    index = {r: i for i, r in enumerate(reps)}
    tables = {}
    for fn, arity in B.sig.functions:
        tables[fn] = [index[theta.labels[B.apply(fn, args)]] for args in itertools.product(reps, repeat=arity)]
    consts = {c: index[theta.labels[v]] for c, v in B.constants.items()}
    Q = FiniteAlgebra(B.sig, len(reps), tables, consts, name)
    return Q, Homomorphism(B, Q, tuple(index[lab] for lab in theta.labels))


# ---------------------------------------------------------------------------
# products


def direct_product(
    factors: Sequence[FiniteAlgebra], bound: int | None = None, name: str = ""
) -> tuple[FiniteAlgebra, list[Homomorphism]]:
    """Coordinate-wise product; element index is row-major in the factor tuple."""
    if not factors:
        raise ValueError("a direct product needs at least one factor")
    sig = factors[0].sig
    for f in factors:
        _require_same_signature(factors[0], f)
    sizes = [f.size for f in factors]
    total = 1
    for s in sizes:
        total *= s
    check_bound(total, "direct product", bound)
    tuples = list(itertools.product(*(range(s) for s in sizes)))
    index = {t: i for i, t in enumerate(tuples)}
    tables = {}
    for fn, arity in sig.functions:
        table = []
        for args in itertools.product(tuples, repeat=arity):
            table.append(index[tuple(f.apply(fn, [a[j] for a in args]) for j, f in enumerate(factors))])
        tables[fn] = table
    consts = {c: index[tuple(f.constant(c) for f in factors)] for c in sig.constants}
    P = FiniteAlgebra(sig, total, tables, consts, name)
    projections = [Homomorphism(P, f, tuple(t[j] for t in tuples)) for j, f in enumerate(factors)]
    return P, projections


def product_tuples(factors: Sequence[FiniteAlgebra]) -> list[tuple[int, ...]]:
    return list(itertools.product(*(range(f.size) for f in factors)))


def is_subdirect(N: Iterable[Sequence[int]], factors: Sequence[FiniteAlgebra]) -> bool:
    """Whether the set of tuples ``N`` is a subdirect product of ``factors``."""
    P, projections = direct_product(factors)
    index = {t: i for i, t in enumerate(product_tuples(factors))}
    try:
        members = sorted({index[tuple(t)] for t in N})
    except KeyError as exc:
        raise ValueError(f"tuple {exc.args[0]} is not an element of the product") from None
    if not members:
        raise ValueError("empty set is not a subalgebra")
    if set(generated_subalgebra(P, members).elements) != set(members):
        raise ValueError("the tuple set is not closed under the operations")
    return all(len({p.map[m] for m in members}) == f.size for p, f in zip(projections, factors))


def _check_filter(D: Iterable[Iterable[int]], I: Sequence[int]) -> set[frozenset]:
    Iset = frozenset(I)
    fam = {frozenset(a) for a in D}
    if not fam:
        raise ValueError("a filter is non-empty")
    if frozenset() in fam:
        raise ValueError("a filter does not contain the empty set")
    for a in fam:
        if not a <= Iset:
            raise ValueError(f"filter member {sorted(a)} is not a subset of the index set")
    for a in fam:
        for b in fam:
            if a & b not in fam:
                raise ValueError("filter is not closed under intersections")
    for a in fam:
        rest = sorted(Iset - a)
        for r in range(len(rest) + 1):
            for extra in itertools.combinations(rest, r):
                if a | frozenset(extra) not in fam:
                    raise ValueError("filter is not upward closed")
    return fam


def is_ultrafilter(D: Iterable[Iterable[int]], I: Sequence[int]) -> bool:
    fam = _check_filter(D, I)
    Iset = frozenset(I)
    for r in range(len(Iset) + 1):
        for a in itertools.combinations(sorted(Iset), r):
            a = frozenset(a)
            if a not in fam and Iset - a not in fam:
                return False
    return True


def principal_filter(I: Sequence[int], generator: Iterable[int]) -> list[frozenset]:
    gen = frozenset(generator)
    rest = sorted(frozenset(I) - gen)
    return [gen | frozenset(extra) for r in range(len(rest) + 1) for extra in itertools.combinations(rest, r)]


def filterproduct(
    factors: Sequence[FiniteAlgebra], D: Iterable[Iterable[int]], bound: int | None = None
) -> tuple[FiniteAlgebra, Homomorphism]:
    """Product of ``factors`` (indexed 0..n-1) modulo ``a ~ b  iff  {i : a_i = b_i} in D``."""
    I = list(range(len(factors)))
    fam = _check_filter(D, I)
    P, _ = direct_product(factors, bound)
    tuples = product_tuples(factors)
    labels = []
    reps: list[int] = []
    for idx, t in enumerate(tuples):
        for r in reps:
            agree = frozenset(i for i in I if tuples[r][i] == t[i])
            if agree in fam:
                labels.append(r)
                break
        else:
            reps.append(idx)
            labels.append(idx)
    theta = Congruence(P, labels)
    return quotient(P, theta)


# ---------------------------------------------------------------------------
# direct limits of algebras


def _check_directed_order(indices: Sequence, leq: set) -> None:
    for i in indices:
        if (i, i) not in leq:
            raise InvalidSystem(f"order is not reflexive at {i!r}")
    for (a, b) in leq:
        if a not in indices or b not in indices:
            raise InvalidSystem("order mentions unknown indices")
        if a != b and (b, a) in leq:
            raise InvalidSystem(f"order is not antisymmetric at {a!r}, {b!r}")
    for (a, b) in leq:
        for c in indices:
            if (b, c) in leq and (a, c) not in leq:
                raise InvalidSystem(f"order is not transitive at {a!r} <= {b!r} <= {c!r}")
    ups = {i: {j for j in indices if (i, j) in leq} for i in indices}
    for a in indices:
        for b in indices:
            if not ups[a] & ups[b]:
                raise InvalidSystem(f"indices {a!r} and {b!r} have no common upper bound")


def direct_limit_algebras(
    indices: Sequence,
    leq: Iterable[tuple],
    algebras: Mapping,
    homs: Mapping,
) -> tuple[FiniteAlgebra, dict]:
    """Direct limit of algebras ``algebras[i]`` along maps ``homs[(i, j)]`` for ``i <= j``.

    Returns the limit algebra and the class map ``(m, i) -> class index``;
    classes are numbered by their least representative in (index order, element) order.
    """
    indices = list(indices)
    leq = set(leq)
    _check_directed_order(indices, leq)
    sig = algebras[indices[0]].sig
    maps = {}
    for (i, j) in leq:
        if i == j and (i, j) not in homs:
            maps[(i, j)] = tuple(range(algebras[i].size))
            continue
        if (i, j) not in homs:
            raise InvalidSystem(f"missing map for {i!r} <= {j!r}")
        h = tuple(homs[(i, j)])
        if algebras[i].sig != sig or algebras[j].sig != sig:
            raise InvalidSystem("algebras in the system have different signatures")
        if not is_homomorphism(h, algebras[i], algebras[j]):
            raise InvalidSystem(f"map {i!r} -> {j!r} is not a homomorphism")
        maps[(i, j)] = h
    for i in indices:
        if maps[(i, i)] != tuple(range(algebras[i].size)):
            raise InvalidSystem(f"map {i!r} -> {i!r} is not the identity")
    for (i, j) in leq:
        for k in indices:
            if (j, k) in leq:
                if tuple(maps[(j, k)][v] for v in maps[(i, j)]) != maps[(i, k)]:
                    raise InvalidSystem(f"cocycle condition fails for {i!r} <= {j!r} <= {k!r}")
    pairs = [(m, i) for i in indices for m in range(algebras[i].size)]
    pos = {p: n for n, p in enumerate(pairs)}
    uf = _UnionFind(len(pairs))
    for (i, k), h in maps.items():
        for m in range(algebras[i].size):
            uf.union(pos[(m, i)], pos[(h[m], k)])
    roots: dict[int, int] = {}
    class_of = {}
    for n, p in enumerate(pairs):
        r = uf.find(n)
        class_of[p] = roots.setdefault(r, len(roots))
    size = len(roots)
    check_bound(size, "direct limit")
    reps: list[tuple] = [None] * size
    for p in pairs:
        c = class_of[p]
        if reps[c] is None:
            reps[c] = p
    ups = {i: [j for j in indices if (i, j) in leq] for i in indices}

    def upper(idxs):
        common = set(ups[idxs[0]])
        for x in idxs[1:]:
            common &= set(ups[x])
        return next(j for j in indices if j in common)

    tables = {}
    for fn, arity in sig.functions:
        table = []
        for args in itertools.product(range(size), repeat=arity):
            reps_args = [reps[a] for a in args]
            j = upper([i for _, i in reps_args]) if reps_args else indices[0]
            vals = [maps[(i, j)][m] for m, i in reps_args]
            table.append(class_of[(algebras[j].apply(fn, vals), j)])
        tables[fn] = table
    consts = {c: class_of[(algebras[indices[0]].constant(c), indices[0])] for c in sig.constants}
    return FiniteAlgebra(sig, size, tables, consts), class_of


# ---------------------------------------------------------------------------
# diagrams and A-algebras


def coefficient_names(A: FiniteAlgebra, taken: Iterable[str] = ()) -> list[str]:
    """Names ``c_0, c_1, ...`` for the added constants of ``L_A``, avoiding clashes."""
    stem = "c_"
    used = set(A.sig.symbols) | set(taken)
    while any(f"{stem}{a}" in used for a in range(A.size)):
        stem = "_" + stem
    return [f"{stem}{a}" for a in range(A.size)]


def core_diagram(A: FiniteAlgebra, names: Sequence[str] | None = None) -> list[AtomicFormula]:
    """The core of the diagram of ``A``: constant bindings, table entries, inequations."""
    names = list(names) if names is not None else coefficient_names(A)
    c = [Const(n) for n in names]
    out = []
    for cname in A.sig.constants:
        out.append(AtomicFormula(Const(cname), c[A.constant(cname)]))
    for fn, arity in A.sig.functions:
        for args in itertools.product(range(A.size), repeat=arity):
            out.append(AtomicFormula(App(fn, tuple(c[a] for a in args)), c[A.apply(fn, args)]))
    for a1, a2 in itertools.combinations(range(A.size), 2):
        out.append(AtomicFormula(c[a1], c[a2], negated=True))
    return out


@dataclass(frozen=True)
class CoefficientStructure:
    """An A-algebra: ``B`` together with a map ``lam: A -> B`` meant to be an embedding."""

    A: FiniteAlgebra
    B: FiniteAlgebra
    lam: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "lam", tuple(self.lam))
        if self.A.sig != self.B.sig:
            raise SignatureError("coefficient algebra and algebra have different signatures")
        if len(self.lam) != self.A.size:
            raise ValueError("the coefficient map must be defined on all of A")

    @property
    def names(self) -> list[str]:
        return coefficient_names(self.A)

    @property
    def sig(self) -> Signature:
        """The expanded language ``L_A``."""
        return self.A.sig.expand(self.names)

    def expand(self) -> FiniteAlgebra:
        """``B`` viewed as an ``L_A``-algebra with ``c_a`` interpreted as ``lam(a)``."""
        return self.B.with_constants(dict(zip(self.names, self.lam)))

    def is_valid(self) -> bool:
        return is_A_algebra(self)[0]


def is_A_algebra(cs: CoefficientStructure) -> tuple[bool, list[str]]:
    """Check every core-diagram sentence of ``A`` in ``B`` under ``c_a -> lam(a)``."""
    B = cs.expand()
    violations = [str(s) for s in core_diagram(cs.A, cs.names) if not _holds_closed(s, B)]
    return not violations, violations


def _holds_closed(sentence: AtomicFormula, algebra: FiniteAlgebra) -> bool:
    eq = eval_term(sentence.left, algebra, {}) == eval_term(sentence.right, algebra, {})
    return eq != sentence.negated


def cat_A_axioms(A: FiniteAlgebra, names: Sequence[str] | None = None):
    """Quasi-identities over ``L_A`` whose models are the A-algebras plus the trivial algebra."""
    from .syntax import Implies, QuantifiedFormula

    names = list(names) if names is not None else coefficient_names(A)
    out = []
    for s in core_diagram(A, names):
        if not s.negated:
            out.append(QuantifiedFormula((), s))
    x, y = "x", "y"
    while x in names or x in A.sig:
        x = "_" + x
    while y in names or y in A.sig:
        y = "_" + y
    for a1, a2 in itertools.combinations(range(A.size), 2):
        out.append(QuantifiedFormula(
            (("forall", x), ("forall", y)),
            Implies(AtomicFormula(Const(names[a1]), Const(names[a2])), AtomicFormula(Var(x), Var(y))),
        ))
    return out
