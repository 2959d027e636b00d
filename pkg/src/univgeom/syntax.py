"""Signatures, terms, atomic formulas, sentences and diagram formulas.

Terms are immutable trees compared structurally.  The concrete syntax is
prefix application (``mul(x, inv(y))``); whether an identifier is a variable,
a constant or a function symbol is decided by the signature and the declared
variable list, never by its spelling.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import EvaluationError, ParseError, SignatureError

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Signature:
    """A finite functional language: function symbols with arities plus constants."""

    functions: tuple[tuple[str, int], ...] = ()
    constants: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "functions", tuple((str(n), int(a)) for n, a in self.functions))
        object.__setattr__(self, "constants", tuple(str(c) for c in self.constants))
        seen = set()
        for name, arity in self.functions:
            if arity < 1:
                raise SignatureError(f"function {name!r} must have positive arity, got {arity}")
            if name in seen:
                raise SignatureError(f"duplicate symbol {name!r}")
            seen.add(name)
        for name in self.constants:
            if name in seen:
                raise SignatureError(f"duplicate symbol {name!r}")
            seen.add(name)
        for name in seen:
            if not _IDENT.fullmatch(name):
                raise SignatureError(f"bad symbol name {name!r}")

    @property
    def symbols(self) -> tuple[str, ...]:
        """All symbol names in declaration order (functions first)."""
        return tuple(n for n, _ in self.functions) + self.constants

    def arity(self, name: str) -> int:
        for n, a in self.functions:
            if n == name:
                return a
        if name in self.constants:
            return 0
        raise SignatureError(f"unknown symbol {name!r}")

    def has_function(self, name: str) -> bool:
        return any(n == name for n, _ in self.functions)

    def has_constant(self, name: str) -> bool:
        return name in self.constants

    def __contains__(self, name: str) -> bool:
        return self.has_function(name) or self.has_constant(name)

    def reduct(self, names: Iterable[str]) -> Signature:
        keep = set(names)
        unknown = keep - set(self.symbols)
        if unknown:
            raise SignatureError(f"reduct mentions symbols outside the signature: {sorted(unknown)}")
        return Signature(
            tuple(f for f in self.functions if f[0] in keep),
            tuple(c for c in self.constants if c in keep),
        )

    def reducts(self) -> list[Signature]:
        """All reducts, ordered by size and then by declaration order."""
        names = self.symbols
        out = []
        for r in range(len(names) + 1):
            for combo in itertools.combinations(names, r):
                out.append(self.reduct(combo))
        return out

    def is_reduct_of(self, other: Signature) -> bool:
        return set(self.functions) <= set(other.functions) and set(self.constants) <= set(other.constants)

    def expand(self, constants: Sequence[str]) -> Signature:
        return Signature(self.functions, self.constants + tuple(constants))

    def fresh_name(self, stem: str, taken: Iterable[str] = ()) -> str:
        used = set(self.symbols) | set(taken)
        name = stem
        while name in used:
            name = "_" + name
        return name


# ---------------------------------------------------------------------------
# terms


class Term:
    __slots__ = ()

    def variables(self) -> frozenset[str]:
        raise NotImplementedError

    def depth(self) -> int:
        raise NotImplementedError

    def size(self) -> int:
        raise NotImplementedError

    def subterms(self) -> Iterator[Term]:
        raise NotImplementedError

    def rename(self, mapping: Mapping[str, str]) -> Term:
        raise NotImplementedError

    def symbols(self) -> frozenset[str]:
        return frozenset(
            t.fn if isinstance(t, App) else t.name for t in self.subterms() if not isinstance(t, Var)
        )

    def to_json(self):
        raise NotImplementedError


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str

    def variables(self):
        return frozenset((self.name,))

    def depth(self):
        return 0

    def size(self):
        return 1

    def subterms(self):
        yield self

    def rename(self, mapping):
        return Var(mapping.get(self.name, self.name))

    def to_json(self):
        return ["var", self.name]

    def __str__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class Const(Term):
    name: str

    def variables(self):
        return frozenset()

    def depth(self):
        return 0

    def size(self):
        return 1

    def subterms(self):
        yield self

    def rename(self, mapping):
        return self

    def to_json(self):
        return ["const", self.name]

    def __str__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class App(Term):
    fn: str
    args: tuple[Term, ...]

    def variables(self):
        out = frozenset()
        for a in self.args:
            out |= a.variables()
        return out

    def depth(self):
        return 1 + max(a.depth() for a in self.args)

    def size(self):
        return 1 + sum(a.size() for a in self.args)

    def subterms(self):
        yield self
        for a in self.args:
            yield from a.subterms()

    def rename(self, mapping):
        return App(self.fn, tuple(a.rename(mapping) for a in self.args))

    def to_json(self):
        return [self.fn, *(a.to_json() for a in self.args)]

    def __str__(self):
        return f"{self.fn}({','.join(str(a) for a in self.args)})"


def app(fn: str, *args: Term) -> App:
    return App(fn, tuple(args))


def check_term(t: Term, sig: Signature, variables: Iterable[str] | None = None) -> None:
    allowed = None if variables is None else set(variables)
    for s in t.subterms():
        if isinstance(s, Var):
            if allowed is not None and s.name not in allowed:
                raise SignatureError(f"variable {s.name!r} is not declared")
        elif isinstance(s, Const):
            if not sig.has_constant(s.name):
                raise SignatureError(f"unknown constant {s.name!r}")
        else:
            if sig.arity(s.fn) != len(s.args) or not sig.has_function(s.fn):
                raise SignatureError(f"arity mismatch for {s.fn!r}")


def term_from_json(data, sig: Signature, variables: Iterable[str] | None = None) -> Term:
    """Decode the nested-array form ``["mul", ["var", "x"], ["const", "e"]]``."""
    if isinstance(data, str):
        return parse_term(data, sig, variables)

    def build(node):
        if not isinstance(node, list) or not node or not isinstance(node[0], str):
            raise SignatureError(f"malformed term node {node!r}")
        head = node[0]
        if head == "var" and len(node) == 2 and isinstance(node[1], str):
            return Var(node[1])
        if head == "const" and len(node) == 2 and isinstance(node[1], str):
            return Const(node[1])
        return App(head, tuple(build(a) for a in node[1:]))

    t = build(data)
    check_term(t, sig, variables)
    return t


# ---------------------------------------------------------------------------
# tokenizer / parser

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>!=|->|[(),=&|.:~]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos)
        kind = "ident" if m.group("ident") else "op"
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, sig: Signature, variables: Iterable[str] | None, free_vars: bool = False):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.sig = sig
        self.variables = None if variables is None else list(variables)
        self.free_vars = free_vars
        self.seen_vars: list[str] = []

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value or kind == "end":
            what = "end of input" if kind == "end" else repr(val)
            raise ParseError(f"expected {value!r}, found {what}", pos)

    def at_end(self) -> bool:
        return self.peek()[0] == "end"

    def term(self) -> Term:
        kind, val, pos = self.take()
        if kind != "ident":
            what = "end of input" if kind == "end" else repr(val)
            raise ParseError(f"expected a term, found {what}", pos)
        if self.variables is not None and val in self.variables:
            if self.peek()[1] == "(":
                raise ParseError(f"variable {val!r} applied as a function", pos)
            return Var(val)
        if self.sig.has_constant(val):
            if self.peek()[1] == "(":
                raise ParseError(f"arity mismatch: constant {val!r} takes no arguments", pos)
            return Const(val)
        if self.sig.has_function(val):
            arity = self.sig.arity(val)
            if self.peek()[1] != "(":
                raise ParseError(f"arity mismatch: {val!r} expects {arity} argument(s)", pos)
            self.take()
            args = [self.term()]
            while self.peek()[1] == ",":
                self.take()
                args.append(self.term())
            self.expect(")")
            if len(args) != arity:
                raise ParseError(f"arity mismatch: {val!r} expects {arity} argument(s), got {len(args)}", pos)
            return App(val, tuple(args))
        if self.free_vars:
            if self.peek()[1] == "(":
                raise ParseError(f"unknown symbol {val!r}", pos)
            if val not in self.seen_vars:
                self.seen_vars.append(val)
            return Var(val)
        raise ParseError(f"unknown symbol {val!r}", pos)

    def atom(self) -> AtomicFormula:
        left = self.term()
        kind, val, pos = self.take()
        if val == "=":
            return AtomicFormula(left, self.term())
        if val == "!=":
            return AtomicFormula(left, self.term(), negated=True)
        raise ParseError(f"expected '=' or '!=', found {val!r}", pos)

    # formula grammar:  implies := disj ['->' disj];  disj := conj ('|' conj)*
    def formula(self):
        left = self.disj()
        if self.peek()[1] == "->":
            self.take()
            return Implies(left, self.disj())
        return left

    def disj(self):
        parts = [self.conj()]
        while self.peek()[1] == "|":
            self.take()
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conj(self):
        parts = [self.literal()]
        while self.peek()[1] == "&":
            self.take()
            parts.append(self.literal())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def literal(self):
        kind, val, pos = self.peek()
        if val == "~" or (kind == "ident" and val == "not" and "not" not in self.sig):
            self.take()
            return Not(self.literal())
        if val == "(":
            self.take()
            inner = self.formula()
            self.expect(")")
            return inner
        return self.atom()


def parse_term(text: str, sig: Signature, variables: Iterable[str] | None) -> Term:
    """Parse ``text`` as a term over ``sig`` whose variables are ``variables``."""
    p = _Parser(text, sig, variables)
    t = p.term()
    if not p.at_end():
        kind, val, pos = p.peek()
        raise ParseError(f"trailing input {val!r}", pos)
    return t


def parse_atomic(text: str, sig: Signature, variables: Iterable[str] | None) -> AtomicFormula:
    p = _Parser(text, sig, variables)
    a = p.atom()
    if not p.at_end():
        kind, val, pos = p.peek()
        raise ParseError(f"trailing input {val!r}", pos)
    return a


def serialize_term(t: Term) -> str:
    return str(t)


# ---------------------------------------------------------------------------
# formulas


@dataclass(frozen=True, slots=True)
class AtomicFormula:
    """``left = right``, or its negation when ``negated`` is set."""

    left: Term
    right: Term
    negated: bool = False

    def variables(self) -> frozenset[str]:
        return self.left.variables() | self.right.variables()

    def rename(self, mapping: Mapping[str, str]) -> AtomicFormula:
        return AtomicFormula(self.left.rename(mapping), self.right.rename(mapping), self.negated)

    def positive(self) -> AtomicFormula:
        return AtomicFormula(self.left, self.right) if self.negated else self

    def negate(self) -> AtomicFormula:
        return AtomicFormula(self.left, self.right, not self.negated)

    def depth(self) -> int:
        return max(self.left.depth(), self.right.depth())

    def to_json(self):
        return {"left": self.left.to_json(), "right": self.right.to_json(), "negated": self.negated}

    def __str__(self):
        return f"{self.left} {'!=' if self.negated else '='} {self.right}"


@dataclass(frozen=True)
class Not:
    body: object

    def __str__(self):
        return f"~({self.body})"


@dataclass(frozen=True)
class And:
    parts: tuple

    def __str__(self):
        return " & ".join(_wrap(p) for p in self.parts)


@dataclass(frozen=True)
class Or:
    parts: tuple

    def __str__(self):
        return " | ".join(_wrap(p) for p in self.parts)


@dataclass(frozen=True)
class Implies:
    premise: object
    conclusion: object

    def __str__(self):
        return f"{_wrap(self.premise)} -> {_wrap(self.conclusion)}"


def _wrap(f) -> str:
    return str(f) if isinstance(f, (AtomicFormula, Not)) else f"({f})"


def matrix_atoms(f) -> Iterator[AtomicFormula]:
    if isinstance(f, AtomicFormula):
        yield f
    elif isinstance(f, Not):
        yield from matrix_atoms(f.body)
    elif isinstance(f, (And, Or)):
        for p in f.parts:
            yield from matrix_atoms(p)
    elif isinstance(f, Implies):
        yield from matrix_atoms(f.premise)
        yield from matrix_atoms(f.conclusion)
    else:
        raise TypeError(f"not a quantifier-free formula: {f!r}")


def negate_formula(f):
    if isinstance(f, AtomicFormula):
        return f.negate()
    if isinstance(f, Not):
        return f.body
    return Not(f)


@dataclass(frozen=True)
class QuantifiedFormula:
    """A prenex sentence ``Q1 x1 ... Qm xm . matrix`` with a quantifier-free matrix."""

    prefix: tuple[tuple[str, str], ...]
    matrix: object

    def __post_init__(self):
        for q, _ in self.prefix:
            if q not in ("forall", "exists"):
                raise ValueError(f"bad quantifier {q!r}")
        names = [v for _, v in self.prefix]
        if len(set(names)) != len(names):
            raise ValueError("a variable is quantified twice")
        free = set().union(*(a.variables() for a in matrix_atoms(self.matrix))) - set(names)
        if free:
            raise ValueError(f"free variables in sentence: {sorted(free)}")

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for _, v in self.prefix)

    def is_universal(self) -> bool:
        return all(q == "forall" for q, _ in self.prefix)

    def is_existential(self) -> bool:
        return all(q == "exists" for q, _ in self.prefix)

    def horn_parts(self) -> tuple[tuple[AtomicFormula, ...], AtomicFormula] | None:
        """Premises and conclusion when this is a quasi-identity (or an identity)."""
        if not self.is_universal():
            return None
        m = self.matrix
        if isinstance(m, AtomicFormula):
            return ((), m) if not m.negated else None
        if not isinstance(m, Implies):
            return None
        concl = m.conclusion
        if not isinstance(concl, AtomicFormula) or concl.negated:
            return None
        prem = m.premise
        parts = prem.parts if isinstance(prem, And) else (prem,)
        if not all(isinstance(p, AtomicFormula) and not p.negated for p in parts):
            return None
        return tuple(parts), concl

    def is_quasi_identity(self) -> bool:
        return self.horn_parts() is not None

    def is_identity(self) -> bool:
        parts = self.horn_parts()
        return parts is not None and not parts[0]

    def dual(self) -> QuantifiedFormula:
        """The sentence with quantifiers flipped and matrix negated (equivalent to the negation)."""
        flip = {"forall": "exists", "exists": "forall"}
        return QuantifiedFormula(tuple((flip[q], v) for q, v in self.prefix), negate_formula(self.matrix))

    def __str__(self):
        out = []
        for q, v in self.prefix:
            if out and out[-1][0] == q:
                out[-1][1].append(v)
            else:
                out.append((q, [v]))
        head = " ".join(f"{q} {' '.join(vs)}" for q, vs in out)
        return f"{head} . ({self.matrix})" if head else f"({self.matrix})"


def parse_sentence(text: str, sig: Signature) -> QuantifiedFormula:
    """Parse ``forall x y . (mul(x,y) = mul(y,x))`` or ``qi: mul(x,x)=e -> x=e``.

    In the ``qi:`` form without a prefix, identifiers outside the signature
    are taken as universally quantified variables.
    """
    toks = _tokenize(text)
    i = 0
    qi = False
    if len(toks) > 2 and toks[0][1] == "qi" and toks[1][1] == ":":
        qi = True
        i = 2
    prefix: list[tuple[str, str]] = []
    # prefix := (quantifier ident+)+ '.'
    if toks[i][0] == "ident" and toks[i][1] in ("forall", "exists"):
        while toks[i][0] == "ident" and toks[i][1] in ("forall", "exists"):
            q = toks[i][1]
            i += 1
            if not (toks[i][0] == "ident" and toks[i][1] not in ("forall", "exists")):
                raise ParseError(f"expected a variable after {q!r}", toks[i][2])
            while toks[i][0] == "ident" and toks[i][1] not in ("forall", "exists"):
                if toks[i][1] in sig:
                    raise ParseError(f"cannot quantify the symbol {toks[i][1]!r}", toks[i][2])
                prefix.append((q, toks[i][1]))
                i += 1
        if toks[i][1] != ".":
            raise ParseError("expected '.' after the quantifier prefix", toks[i][2])
        i += 1
    rest_start = toks[i][2]
    declared = [v for _, v in prefix]
    p = _Parser(text[rest_start:], sig, declared, free_vars=qi and not prefix)
    matrix = p.formula()
    if not p.at_end():
        kind, val, pos = p.peek()
        raise ParseError(f"trailing input {val!r}", rest_start + pos)
    if qi and not prefix:
        prefix = [("forall", v) for v in p.seen_vars]
    try:
        sentence = QuantifiedFormula(tuple(prefix), matrix)
    except ValueError as exc:
        raise ParseError(str(exc), rest_start) from None
    if qi and not sentence.is_quasi_identity():
        raise ParseError("not a quasi-identity (expected 'equations -> equation')", rest_start)
    return sentence


# ---------------------------------------------------------------------------
# evaluation


def eval_term(t: Term, algebra, point: Mapping[str, int]) -> int:
    """Value of ``t`` in ``algebra`` under the assignment ``point``."""
    if isinstance(t, Var):
        try:
            return point[t.name]
        except KeyError:
            raise EvaluationError(f"no value assigned to variable {t.name!r}") from None
    if isinstance(t, Const):
        return algebra.constant(t.name)
    return algebra.apply(t.fn, [eval_term(a, algebra, point) for a in t.args])


def eval_atomic(a: AtomicFormula, algebra, point: Mapping[str, int]) -> bool:
    eq = eval_term(a.left, algebra, point) == eval_term(a.right, algebra, point)
    return eq != a.negated


def eval_matrix(f, algebra, point: Mapping[str, int]) -> bool:
    if isinstance(f, AtomicFormula):
        return eval_atomic(f, algebra, point)
    if isinstance(f, Not):
        return not eval_matrix(f.body, algebra, point)
    if isinstance(f, And):
        return all(eval_matrix(p, algebra, point) for p in f.parts)
    if isinstance(f, Or):
        return any(eval_matrix(p, algebra, point) for p in f.parts)
    if isinstance(f, Implies):
        return (not eval_matrix(f.premise, algebra, point)) or eval_matrix(f.conclusion, algebra, point)
    raise TypeError(f"not a quantifier-free formula: {f!r}")


# ---------------------------------------------------------------------------
# diagram formulas


@dataclass(frozen=True)
class VariableMap:
    """A total map between finite variable lists."""

    source: tuple[str, ...]
    target: tuple[str, ...]
    mapping: Mapping[str, str] = field(hash=False)

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "target", tuple(self.target))
        object.__setattr__(self, "mapping", dict(self.mapping))
        missing = [v for v in self.source if v not in self.mapping]
        if missing:
            raise ValueError(f"variable map is partial: no image for {missing}")
        bad = [v for v in self.source if self.mapping[v] not in self.target]
        if bad:
            raise ValueError(f"variable map leaves the target list at {bad}")

    @classmethod
    def identity(cls, variables: Sequence[str], target: Sequence[str] | None = None) -> VariableMap:
        return cls(tuple(variables), tuple(target if target is not None else variables), {v: v for v in variables})

    def __call__(self, v: str) -> str:
        return self.mapping[v]

    def is_identity(self) -> bool:
        return all(self.mapping[v] == v for v in self.source)

    def is_injective(self) -> bool:
        return len(set(self.mapping[v] for v in self.source)) == len(self.source)

    def then(self, other: VariableMap) -> VariableMap:
        """Composite ``other ∘ self``."""
        return VariableMap(self.source, other.target, {v: other(self(v)) for v in self.source})


@dataclass(frozen=True)
class DiagramFormula:
    """A conjunction of literals over a finite reduct and a finite variable list."""

    reduct: Signature
    variables: tuple[str, ...]
    conjuncts: frozenset

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "conjuncts", frozenset(self.conjuncts))

    def positive(self) -> list[AtomicFormula]:
        return [c for c in self.conjuncts if not c.negated]

    def negative(self) -> list[AtomicFormula]:
        return [c for c in self.conjuncts if c.negated]

    def sorted_conjuncts(self) -> list[AtomicFormula]:
        return sorted(self.conjuncts, key=lambda c: (str(c.positive()), c.negated))

    def function_table(self) -> dict[tuple[str, tuple[str, ...]], str]:
        """Positive ``F(x1..xn) = x0`` conjuncts as a lookup ``(F, (x1..xn)) -> x0``."""
        out = {}
        for c in self.conjuncts:
            if not c.negated and isinstance(c.left, App) and isinstance(c.right, Var):
                out[(c.left.fn, tuple(a.name for a in c.left.args))] = c.right.name
        return out

    def constant_table(self) -> dict[str, str]:
        out = {}
        for c in self.conjuncts:
            if not c.negated and isinstance(c.left, Var) and isinstance(c.right, Const):
                out[c.right.name] = c.left.name
        return out

    def __str__(self):
        return " & ".join(str(c) for c in self.sorted_conjuncts())


def substitute(phi: DiagramFormula, gamma: VariableMap | Mapping[str, str]) -> frozenset:
    """Conjuncts of ``phi`` after renaming every variable ``x`` to ``gamma(x)``."""
    mapping = gamma.mapping if isinstance(gamma, VariableMap) else dict(gamma)
    missing = [v for v in phi.variables if v not in mapping]
    if missing:
        raise ValueError(f"variable map is partial: no image for {missing}")
    return frozenset(c.rename(mapping) for c in phi.conjuncts)


@dataclass
class DiagramReport:
    valid: bool
    violations: list[str]

    def __bool__(self):
        return self.valid


def _shape(c: AtomicFormula, variables: set) -> str | None:
    l, r = c.left, c.right
    if isinstance(l, Var) and isinstance(r, Var):
        return "ineq" if c.negated and l.name != r.name else None
    if isinstance(l, Var) and isinstance(r, Const):
        return "const"
    if isinstance(l, App) and isinstance(r, Var) and all(isinstance(a, Var) for a in l.args):
        return "fn"
    return None


def validate_diagram_formula(candidate: DiagramFormula) -> DiagramReport:
    """Check the three completeness conditions and consistency; list every violation."""
    sig = candidate.reduct
    X = list(candidate.variables)
    xs = set(X)
    problems: list[str] = []
    if len(xs) != len(X):
        problems.append("variable list has repeats")
    for c in candidate.conjuncts:
        if not c.variables() <= xs:
            problems.append(f"conjunct {c} uses variables outside the list")
            continue
        shape = _shape(c, xs)
        if shape is None:
            problems.append(f"conjunct {c} is not of diagram shape")
            continue
        if shape == "fn":
            if not sig.has_function(c.left.fn) or sig.arity(c.left.fn) != len(c.left.args):
                problems.append(f"conjunct {c} uses a symbol outside the reduct")
        elif shape == "const" and not sig.has_constant(c.right.name):
            problems.append(f"conjunct {c} uses a symbol outside the reduct")
    conj = candidate.conjuncts
    for x in X:
        for y in X:
            if x != y and AtomicFormula(Var(x), Var(y), True) not in conj:
                problems.append(f"missing inequation {x} != {y}")
    for name, arity in sig.functions:
        for tup in itertools.product(X, repeat=arity + 1):
            atom = AtomicFormula(App(name, tuple(Var(v) for v in tup[1:])), Var(tup[0]))
            pos, neg = atom in conj, atom.negate() in conj
            if not pos and not neg:
                problems.append(f"missing F-entry for {atom}")
            elif pos and neg:
                problems.append(f"clash: both {atom} and its negation present")
        values: dict[tuple, list[str]] = {}
        for c in conj:
            if not c.negated and isinstance(c.left, App) and c.left.fn == name and isinstance(c.right, Var):
                values.setdefault(c.left.args, []).append(c.right.name)
        for args, vals in values.items():
            if len(vals) > 1:
                problems.append(
                    f"clash: {name}({','.join(map(str, args))}) has values {sorted(vals)}"
                )
    for cname in sig.constants:
        positives = []
        for x in X:
            atom = AtomicFormula(Var(x), Const(cname))
            pos, neg = atom in conj, atom.negate() in conj
            if not pos and not neg:
                problems.append(f"missing constant entry for {atom}")
            elif pos and neg:
                problems.append(f"clash: both {atom} and its negation present")
            if pos:
                positives.append(x)
        if len(positives) > 1:
            problems.append(f"clash: constant {cname} equals distinct variables {positives}")
    return DiagramReport(not problems, problems)


def enumerate_terms(sig: Signature, variables: Sequence[str], depth: int) -> list[Term]:
    """Every term of depth at most ``depth`` over ``variables``, shallow ones first."""
    everything: list[Term] = [Var(v) for v in variables] + [Const(c) for c in sig.constants]
    newest = set(everything)
    for _ in range(depth):
        fresh: list[Term] = []
        for fn, arity in sig.functions:
            for args in itertools.product(everything, repeat=arity):
                # a term is new at this depth iff some argument came from the last layer
                if any(a in newest for a in args):
                    fresh.append(App(fn, args))
        everything.extend(fresh)
        newest = set(fresh)
    return everything
