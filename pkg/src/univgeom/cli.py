"""Command line front end.

Every subcommand reads JSON documents (a path, or ``-`` for standard input),
runs one operation and prints a report.  Exit status: 0 on success (boolean
queries included), 2 for bad input, 3 when a size bound is exceeded, 1 for
internal defects and failing corpus runs.
"""

from __future__ import annotations

import argparse
import sys
import time
import traceback

from . import _config
from . import documents as docs
from .algebra import (
    CoefficientStructure,
    FiniteAlgebra,
    direct_limit_algebras,
    direct_product,
    enumerate_homomorphisms,
    filterproduct,
    quotient,
)
from .errors import BoundExceeded, UnivGeomError
from .geometry import TraceSubalgebra, decompose, is_irreducible, radical_member, solve
from .limit import build_limit, canonical_system, embed_into_factors, validate_system
from .models import (
    check_quasi_identity,
    check_sentence,
    discriminates,
    locally_embeddable,
    separates,
)
from .presentations import congruent_closure_query
from .syntax import parse_atomic
from .unification import atp_of, theorem_a_check, theorem_b_check


class Session:
    """Loads inputs and remembers their hashes for the report."""

    def __init__(self, args):
        self.args = args
        self.inputs: dict[str, str] = {}

    def text(self, label: str, source: str) -> str:
        text = docs.read_text(source)
        self.inputs[label] = docs.digest(text)
        return text

    def document(self, label: str, source: str, kind):
        return docs.parse_document(self.text(label, source), kind)

    def algebra(self, label: str, source: str, plain: bool = True):
        A = docs.algebra_from_json(self.document(label, source, "algebra"))
        if plain and isinstance(A, CoefficientStructure):
            return A.B
        return A

    def algebras(self, label: str, sources) -> list[FiniteAlgebra]:
        return [self.algebra(f"{label}[{k}]", s) for k, s in enumerate(sources)]

    def klass(self, label: str, source: str) -> list[FiniteAlgebra]:
        doc = self.document(label, source, ("class", "algebra"))
        if doc["kind"] == "algebra":
            return [docs.algebra_from_json(doc)]
        return docs.class_from_json(doc)

    def note(self, label: str, value: str):
        self.inputs[label] = docs.digest(value)


def _system_and_set(s: Session):
    B = s.algebra("algebra", s.args.algebra, plain=False)
    S = docs.system_from_json(s.document("system", s.args.system, "system"), B)
    return B, S, solve(S, B)


def _equation(s: Session, sig, variables):
    s.note("equation", s.args.equation)
    try:
        return parse_atomic(s.args.equation, sig, variables)
    except UnivGeomError as exc:
        raise docs.SchemaError(f"bad equation: {exc}") from None


def _plain(B):
    return B.B if isinstance(B, CoefficientStructure) else B


# ---------------------------------------------------------------------------
# commands; each returns the ``result`` part of the report


def cmd_solve(s):
    _, S, Y = _system_and_set(s)
    return {"variables": list(Y.variables), "points": docs.points_json(Y), "count": len(Y.points)}


def cmd_radical_member(s):
    B, S, Y = _system_and_set(s)
    q = _equation(s, S.language, S.variables)
    return {"equation": str(q), "member": radical_member(Y, q, s.args.method)}


def cmd_coordinate(s):
    _, S, Y = _system_and_set(s)
    T = TraceSubalgebra(Y)
    return {
        "algebra": docs.algebra_document(T.algebra),
        "generators": dict(zip(Y.variables, T.projections)),
        "witnesses": [str(w) for w in T.witnesses],
    }


def cmd_irreducible(s):
    _, S, Y = _system_and_set(s)
    r = is_irreducible(Y)
    return {
        "irreducible": r.irreducible,
        "generic_point": list(r.generic_point) if r.generic_point is not None else None,
        "cover": [{"equation": str(eq), "points": [list(p) for p in pts]} for eq, pts in r.cover],
    }


def cmd_decompose(s):
    _, S, Y = _system_and_set(s)
    comps = decompose(Y, s.args.order)
    return {"components": [
        {"points": docs.points_json(c), "equations": [str(e) for e in c.system.equations] if c.system else []}
        for c in comps
    ]}


def cmd_homs(s):
    C = s.algebra("source", s.args.source, plain=False)
    B = s.algebra("target", s.args.target, plain=False)
    homs = enumerate_homomorphisms(C, B, s.args.mode)
    return {"mode": s.args.mode, "count": len(homs), "maps": [list(h.map) for h in homs]}


def cmd_embed(s):
    C = s.algebra("c", s.args.c, plain=False)
    B = s.algebra("b", s.args.b, plain=False)
    homs = enumerate_homomorphisms(C, B, "injective")
    return {"embeds": bool(homs), "embedding": list(homs[0].map) if homs else None}


def cmd_separates(s):
    K = s.klass("class", s.args.klass)
    C = s.algebra("c", s.args.c)
    ok, pair = separates(K, C)
    return {"separates": ok, "unseparated_pair": list(pair) if pair else None}


def cmd_discriminates(s):
    K = s.klass("class", s.args.klass)
    C = s.algebra("c", s.args.c)
    ok, h = discriminates(K, C)
    return {"discriminates": ok, "embedding": list(h.map) if ok else None}


def cmd_ucl_member(s):
    K = s.klass("class", s.args.klass)
    C = s.algebra("c", s.args.c)
    r = locally_embeddable(C, K)
    cert = docs.diagram_to_json(r.certificate) if r.certificate is not None else None
    return {"member": r.verdict, "certificate": cert}


def _sentence(s, sig):
    if s.args.text is not None:
        s.note("sentence", s.args.text)
        return docs.sentence_from_json({"text": s.args.text}, sig)
    if s.args.sentence is None:
        raise docs.SchemaError("give a sentence with --sentence or --text")
    return docs.sentence_from_json(s.document("sentence", s.args.sentence, "sentence"), sig)


def cmd_sentence_check(s):
    B = _plain(s.algebra("algebra", s.args.algebra, plain=False))
    sigma = _sentence(s, B.sig)
    return {"sentence": str(sigma), "holds": check_sentence(B, sigma)}


def cmd_qi_check(s):
    B = _plain(s.algebra("algebra", s.args.algebra, plain=False))
    sigma = _sentence(s, B.sig)
    return {"sentence": str(sigma), "holds": check_quasi_identity(B, sigma)}


def cmd_product(s):
    factors = s.algebras("algebra", s.args.algebra)
    P, _ = direct_product(factors)
    return {"algebra": docs.algebra_document(P)}


def cmd_quotient(s):
    B = s.algebra("algebra", s.args.algebra)
    theta = docs.congruence_from_json(s.document("congruence", s.args.congruence, "congruence"), B)
    Q, q = quotient(B, theta)
    return {"algebra": docs.algebra_document(Q), "classes": theta.classes(), "map": list(q.map)}


def cmd_filterproduct(s):
    factors = s.algebras("algebra", s.args.algebra)
    D = docs.filter_from_json(s.document("filter", s.args.filter, "filter"), len(factors))
    U, q = filterproduct(factors, D)
    return {"algebra": docs.algebra_document(U), "map": list(q.map)}


def cmd_direct_limit(s):
    doc = s.document("system", s.args.system, "direct-system")
    parsed = docs.direct_system_from_json(doc)
    if not isinstance(parsed, tuple):
        raise docs.SchemaError("direct-limit takes a system of algebras; use limit-build for formulas")
    indices, order, algebras, homs = parsed
    D, class_of = direct_limit_algebras(indices, order, algebras, homs)
    return {
        "algebra": docs.algebra_document(D),
        "class_of": [{"element": m, "index": i, "class": c} for (m, i), c in sorted(class_of.items(), key=lambda kv: (indices.index(kv[0][1]), kv[0][0]))],
    }


def cmd_closure_query(s):
    P = docs.presentation_from_json(s.document("presentation", s.args.presentation, "presentation"))
    q = _equation(s, P.sig, P.variables)
    ans = congruent_closure_query(P, q, s.args.depth, extend=s.args.depth is not None)
    return {"equation": str(q), "derivable": ans}


def _formula_system(s):
    doc = s.document("system", s.args.system, "direct-system")
    L = docs.direct_system_from_json(doc)
    if isinstance(L, tuple):
        raise docs.SchemaError("expected a system of diagram formulas")
    return L


def cmd_limit_validate(s):
    r = validate_system(_formula_system(s))
    return {"valid": r.valid, "violations": r.violations, "uncovered": r.uncovered}


def _limit_json(lim):
    return {
        "algebra": docs.algebra_document(lim.algebra),
        "partial": lim.partial,
        "class_of": [{"variable": x, "index": str(i), "class": c} for (x, i), c in lim.class_of.items()],
    }


def cmd_limit_build(s):
    return _limit_json(build_limit(_formula_system(s), allow_partial=s.args.allow_partial, audit_seed=s.args.seed or 0))


def cmd_canonical_system(s):
    B = s.algebra("algebra", s.args.algebra, plain=False)
    if isinstance(B, CoefficientStructure):
        B = B.expand()
    return {"system": docs.direct_system_document(canonical_system(B))}


def cmd_limit_embed(s):
    L = _formula_system(s)
    target = s.algebra("target", s.args.target, plain=False)
    if isinstance(target, CoefficientStructure):
        target = target.expand()
    emb = embed_into_factors(L, target)
    return {"limit": _limit_json(emb.limit), "index": str(emb.index), "map": list(emb.map)}


def cmd_atp(s):
    B = _plain(s.algebra("algebra", s.args.algebra, plain=False))
    try:
        tup = [int(v) for v in s.args.tuple.split(",") if v.strip()]
    except ValueError:
        raise docs.SchemaError(f"bad tuple {s.args.tuple!r}") from None
    if any(not 0 <= v < B.size for v in tup):
        raise docs.SchemaError("tuple entries must be elements of the algebra")
    t = atp_of(B, tup)
    return {
        "tuple": tup,
        "variables": list(t.variables),
        "elements": list(t.elements),
        "witnesses": {str(m): str(t.witness[m]) for m in t.elements},
        "algebra": docs.algebra_document(t.algebra),
        "generators": list(t.generators),
    }


def cmd_unify_a(s):
    C = _plain(s.algebra("c", s.args.c, plain=False))
    B = _plain(s.algebra("b", s.args.b, plain=False))
    return theorem_a_check(C, B).to_json(timings=s.args.timings)


def _with_coefficients(s, label, source, A, lam_text):
    X = s.algebra(label, source, plain=False)
    if isinstance(X, CoefficientStructure):
        if lam_text is not None:
            raise docs.SchemaError(f"--{label}-map given for an algebra that already carries coefficients")
        return X
    if lam_text is None:
        raise docs.SchemaError(f"{label} has no coefficient map; add one to the document or pass --{label}-map")
    s.note(f"{label}-map", lam_text)
    try:
        lam = tuple(int(v) for v in lam_text.split(","))
        return CoefficientStructure(A, X, lam)
    except ValueError as exc:
        raise docs.SchemaError(f"bad coefficient map: {exc}") from None


def cmd_unify_b(s):
    A = _plain(s.algebra("a", s.args.a, plain=False))
    C = _with_coefficients(s, "c", s.args.c, A, s.args.c_map)
    B = _with_coefficients(s, "b", s.args.b, A, s.args.b_map)
    if C.A != A or B.A != A:
        raise docs.SchemaError("the coefficient algebras differ from --a")
    return theorem_b_check(A, C, B).to_json(timings=s.args.timings)


def cmd_corpus_run(s):
    from .corpus import SUITES, corpus_from_manifest, default_manifest

    if s.args.manifest is None:
        doc = default_manifest()
        s.note("manifest", docs.dump(doc))
    else:
        doc = s.document("manifest", s.args.manifest, "manifest")
    suites = doc.get("suites") or {}
    if not isinstance(suites, dict) or not suites:
        raise docs.SchemaError("nothing to run: the manifest lists no suites")
    unknown = sorted(set(suites) - set(SUITES))
    if unknown:
        raise docs.SchemaError(f"unknown suites: {', '.join(unknown)}")
    if s.args.seed is not None:
        doc = dict(doc, seed=s.args.seed)
    corpus = corpus_from_manifest(doc)
    s.seed = corpus.seed
    results = {}
    for name, params in suites.items():
        start = time.perf_counter()
        r = SUITES[name](corpus, **(params or {}))
        results[name] = r.to_json()
        if s.args.timings:
            results[name]["seconds"] = round(time.perf_counter() - start, 3)
    s.failed = not all(r["passed"] for r in results.values())
    return {
        "passed": not s.failed,
        "summary": {name: f"{r['checks'] - r['failed']}/{r['checks']}" for name, r in results.items()},
        "suites": results,
    }


# ---------------------------------------------------------------------------
# argument parsing


def _global_flags(parser, suppress: bool):
    kw = {"default": argparse.SUPPRESS} if suppress else {}
    parser.add_argument("--max-universe", type=int, help="largest universe any construction may build",
                        **(kw or {"default": _config.DEFAULT_MAX_UNIVERSE}))
    parser.add_argument("--seed", type=int, help="seed for randomized steps", **(kw or {"default": None}))
    parser.add_argument("--format", choices=("json", "text"), **(kw or {"default": "json"}))
    parser.add_argument("--timings", action="store_true", help="include wall-clock times (breaks byte equality)", **kw)


# the global flags may also follow the subcommand
_COMMON = argparse.ArgumentParser(add_help=False)
_global_flags(_COMMON, suppress=True)


def _add(sub, name, fn, help_text, *options):
    p = sub.add_parser(name, help=help_text, parents=[_COMMON])
    for opt in options:
        flags, kw = opt
        p.add_argument(*flags, **kw)
    p.set_defaults(handler=fn)
    return p


def _req(flag, help_text, **kw):
    return ((flag,), dict(required=True, help=help_text, **kw))


def _opt(flag, help_text, **kw):
    return ((flag,), dict(help=help_text, **kw))


ALG = _req("--algebra", "algebra document")
SYS = _req("--system", "equation system document")
KLASS = (("--class",), dict(dest="klass", required=True, help="class document (or a single algebra)"))
FACTORS = (("--algebra",), dict(action="append", required=True, help="factor algebra (repeat)"))
SENTENCE = [_opt("--sentence", "sentence document"), _opt("--text", "sentence text")]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="univgeom", description="Finite algebras, equations and their geometry.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    _add(sub, "solve", cmd_solve, "solution set of a system", ALG, SYS)
    _add(sub, "radical-member", cmd_radical_member, "does an equation hold on the whole solution set",
         ALG, SYS, _req("--equation", "equation text"),
         _opt("--method", "trace or points", choices=("trace", "points"), default="trace"))
    _add(sub, "coordinate", cmd_coordinate, "coordinate algebra of a solution set", ALG, SYS)
    _add(sub, "irreducible", cmd_irreducible, "irreducibility with generic point or cover", ALG, SYS)
    _add(sub, "decompose", cmd_decompose, "irreducible components", ALG, SYS,
         _opt("--order", "component search order", choices=("forward", "reverse"), default="forward"))
    _add(sub, "homs", cmd_homs, "enumerate homomorphisms", _req("--source", "source algebra"),
         _req("--target", "target algebra"),
         _opt("--mode", "which homomorphisms", choices=("all", "injective", "fixing", "fixing-injective"),
              default="all"))
    _add(sub, "embed", cmd_embed, "find an embedding of C into B", _req("--c", "algebra C"), _req("--b", "algebra B"))
    _add(sub, "separates", cmd_separates, "is C separated by the class", KLASS, _req("--c", "algebra C"))
    _add(sub, "discriminates", cmd_discriminates, "is C discriminated by the class", KLASS, _req("--c", "algebra C"))
    _add(sub, "ucl-member", cmd_ucl_member, "is C locally embeddable into the class", KLASS, _req("--c", "algebra C"))
    _add(sub, "sentence-check", cmd_sentence_check, "truth of a prenex sentence", ALG, *SENTENCE)
    _add(sub, "qi-check", cmd_qi_check, "truth of a quasi-identity", ALG, *SENTENCE)
    _add(sub, "product", cmd_product, "direct product",
         FACTORS)
    _add(sub, "quotient", cmd_quotient, "quotient by a congruence", ALG, _req("--congruence", "congruence document"))
    _add(sub, "filterproduct", cmd_filterproduct, "filter product",
         FACTORS,
         _req("--filter", "filter document"))
    _add(sub, "direct-limit", cmd_direct_limit, "direct limit of a system of algebras",
         _req("--system", "direct-system document"))
    _add(sub, "closure-query", cmd_closure_query, "is an equation derivable from a presentation",
         _req("--presentation", "presentation document"), _req("--equation", "equation text"),
         _opt("--depth", "also saturate all terms up to this depth", type=int))
    _add(sub, "limit-validate", cmd_limit_validate, "check a system of diagram formulas",
         _req("--system", "direct-system document"))
    _add(sub, "limit-build", cmd_limit_build, "limit algebra of a system of diagram formulas",
         _req("--system", "direct-system document"),
         _opt("--allow-partial", "accept systems that cover part of the signature", action="store_true"))
    _add(sub, "canonical-system", cmd_canonical_system, "the system of local diagrams of an algebra", ALG)
    _add(sub, "limit-embed", cmd_limit_embed, "embed the limit algebra into a target",
         _req("--system", "direct-system document"), _req("--target", "target algebra"))
    _add(sub, "atp", cmd_atp, "atomic type of a tuple", ALG, _req("--tuple", "comma separated elements"))
    _add(sub, "unify-a", cmd_unify_a, "seven-way embeddability check", _req("--c", "algebra C"), _req("--b", "algebra B"))
    _add(sub, "unify-b", cmd_unify_b, "seven-way check with coefficients",
         _req("--a", "coefficient algebra"), _req("--c", "algebra C"), _req("--b", "algebra B"),
         _opt("--c-map", "coefficient map of C, comma separated"),
         _opt("--b-map", "coefficient map of B, comma separated"))
    _add(sub, "corpus-run", cmd_corpus_run, "run the property suites of a manifest",
         _opt("--manifest", "manifest document (default: the shipped one)"))
    return parser


def render_text(value, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(value, dict):
        lines = []
        for k in sorted(value):
            v = value[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
        return "\n".join(lines)
    if isinstance(value, list):
        if all(not isinstance(v, (dict, list)) for v in value):
            return pad + " ".join(_scalar(v) for v in value)
        return "\n".join(f"{pad}-\n{render_text(v, indent + 1)}" if isinstance(v, (dict, list)) else f"{pad}- {_scalar(v)}"
                         for v in value)
    return pad + _scalar(value)


def _scalar(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (dict, list)):
        return "[]" if isinstance(v, list) else "{}"
    return str(v)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    s = Session(args)
    s.seed = args.seed
    s.failed = False
    try:
        _config.set_max_universe(args.max_universe)
        result = args.handler(s)
    except BoundExceeded as exc:
        print(f"error: bound exceeded: {exc}", file=sys.stderr)
        return 3
    except (UnivGeomError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 1
    finally:
        _config.set_max_universe(_config.DEFAULT_MAX_UNIVERSE)
    rep = docs.report(args.command, s.inputs, s.seed, result)
    if args.format == "json":
        sys.stdout.write(docs.dump(rep))
    else:
        sys.stdout.write(render_text(rep) + "\n")
    return 1 if s.failed else 0


if __name__ == "__main__":
    sys.exit(main())
