"""JSON documents read and written by the command line tool.

Every document is an object with ``kind`` and ``version`` (currently 1).
Terms may be given as text (``"mul(x,e)"``) or nested arrays
(``["mul", ["var", "x"], ["const", "e"]]``); output always uses text.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

from .algebra import CoefficientStructure, FiniteAlgebra, signature_to_json
from .errors import ParseError, SchemaError, SignatureError
from .geometry import AlgebraicSet, EquationSystem
from .limit import FormulaDirectSystem
from .presentations import Presentation
from .syntax import (
    AtomicFormula,
    DiagramFormula,
    Signature,
    VariableMap,
    parse_atomic,
    parse_sentence,
    term_from_json,
)

VERSION = 1
KINDS = ("signature", "algebra", "system", "presentation", "direct-system", "class", "sentence",
         "congruence", "filter", "manifest", "report")


def read_text(source: str) -> str:
    if source == "-":
        import sys

        return sys.stdin.read()
    try:
        return Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read {source}: {exc.strerror}") from None


def digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def parse_document(text: str, kind: str | tuple[str, ...] | None = None) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from None
    if not isinstance(doc, dict):
        raise SchemaError("a document must be a JSON object")
    if doc.get("version") != VERSION:
        raise SchemaError(f"unsupported or missing version {doc.get('version')!r} (expected {VERSION})")
    got = doc.get("kind")
    if got not in KINDS:
        raise SchemaError(f"unknown document kind {got!r}")
    wanted = (kind,) if isinstance(kind, str) else kind
    if wanted and got not in wanted:
        raise SchemaError(f"expected a {' or '.join(wanted)} document, got {got!r}")
    return doc


def _field(doc: dict, name: str, typ=None):
    if name not in doc:
        raise SchemaError(f"missing field {name!r}")
    value = doc[name]
    if typ is not None and not isinstance(value, typ):
        raise SchemaError(f"field {name!r} has the wrong type")
    return value


def dump(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _wrap(kind: str, body: dict) -> dict:
    out = {"kind": kind, "version": VERSION}
    out.update(body)
    return out


# ---------------------------------------------------------------------------
# signatures and algebras


def signature_from_json(data) -> Signature:
    try:
        functions = tuple((str(n), int(a)) for n, a in _field(data, "functions", list))
        constants = tuple(str(c) for c in data.get("constants", []))
        return Signature(functions, constants)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"bad signature: {exc}") from None


def signature_document(sig: Signature) -> dict:
    return _wrap("signature", signature_to_json(sig))


def algebra_from_json(doc: dict):
    """A :class:`FiniteAlgebra`, or a :class:`CoefficientStructure` when ``coefficients`` is present."""
    sig = signature_from_json(_field(doc, "signature", dict))
    try:
        B = FiniteAlgebra(
            sig,
            int(_field(doc, "size")),
            _field(doc, "tables", dict) if sig.functions else doc.get("tables", {}),
            doc.get("constants", {}),
            str(doc.get("name", "")),
        )
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"bad algebra: {exc}") from None
    coeff = doc.get("coefficients")
    if coeff is None:
        return B
    A = algebra_from_json(_field(coeff, "algebra", dict))
    if isinstance(A, CoefficientStructure):
        raise SchemaError("a coefficient algebra cannot itself carry coefficients")
    try:
        return CoefficientStructure(A, B, tuple(int(v) for v in _field(coeff, "map", list)))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"bad coefficient map: {exc}") from None


def algebra_document(B) -> dict:
    if isinstance(B, CoefficientStructure):
        out = algebra_document(B.B)
        out["coefficients"] = {"algebra": algebra_document(B.A), "map": list(B.lam)}
        return out
    body = B.to_json()
    body["name"] = B.name
    return _wrap("algebra", body)


def load_algebra(source: str):
    text = read_text(source)
    return algebra_from_json(parse_document(text, "algebra")), text


def class_from_json(doc: dict) -> list:
    members = _field(doc, "members", list)
    if not members:
        raise SchemaError("a class needs at least one member")
    out = []
    for m in members:
        if not isinstance(m, dict):
            raise SchemaError("class members must be algebra documents")
        out.append(algebra_from_json(m))
    return out


def class_document(members) -> dict:
    return _wrap("class", {"members": [algebra_document(m) for m in members]})


# ---------------------------------------------------------------------------
# systems, presentations, sentences


def _equation(item, sig: Signature, variables) -> AtomicFormula:
    try:
        if isinstance(item, str):
            return parse_atomic(item, sig, variables)
        if isinstance(item, list) and len(item) == 2:
            return AtomicFormula(term_from_json(item[0], sig, variables), term_from_json(item[1], sig, variables))
    except (ParseError, SignatureError) as exc:
        raise SchemaError(f"bad equation {item!r}: {exc}") from None
    raise SchemaError(f"an equation is a string or a pair of terms, got {item!r}")


def system_from_json(doc: dict, B=None) -> EquationSystem:
    """Parse a system; against a coefficient structure the constants ``c_a`` become available."""
    variables = tuple(str(v) for v in _field(doc, "variables", list))
    if B is not None:
        lang = B.sig
        sig = B.A.sig if isinstance(B, CoefficientStructure) else B.sig
        coeff = B if isinstance(B, CoefficientStructure) else None
        if "signature" in doc and not signature_from_json(doc["signature"]).is_reduct_of(lang):
            raise SchemaError("the system's signature is not interpreted by the algebra")
    else:
        sig = lang = signature_from_json(_field(doc, "signature", dict))
        coeff = None
    eqs = tuple(_equation(e, lang, variables) for e in _field(doc, "equations", list))
    try:
        return EquationSystem(sig, variables, eqs, coeff)
    except (ValueError, SignatureError) as exc:
        raise SchemaError(f"bad system: {exc}") from None


def system_document(S: EquationSystem) -> dict:
    return _wrap("system", {
        "signature": signature_to_json(S.language),
        "variables": list(S.variables),
        "equations": [str(e) for e in S.equations],
    })


def points_json(Y: AlgebraicSet) -> list[list[int]]:
    return [list(p) for p in Y.points]


def presentation_from_json(doc: dict) -> Presentation:
    sig = signature_from_json(_field(doc, "signature", dict))
    variables = tuple(str(v) for v in _field(doc, "variables", list))
    rels = tuple(_equation(e, sig, variables) for e in _field(doc, "relations", list))
    try:
        return Presentation(sig, variables, rels)
    except (ValueError, SignatureError) as exc:
        raise SchemaError(f"bad presentation: {exc}") from None


def presentation_document(P: Presentation) -> dict:
    return _wrap("presentation", {
        "signature": signature_to_json(P.sig),
        "variables": list(P.variables),
        "relations": [str(r) for r in P.relations],
    })


def sentence_from_json(doc: dict, sig: Signature):
    text = _field(doc, "text", str)
    try:
        return parse_sentence(text, sig)
    except (ParseError, SignatureError) as exc:
        raise SchemaError(f"bad sentence: {exc}") from None


# ---------------------------------------------------------------------------
# direct systems


def _diagram_from_json(data: dict, sig: Signature) -> DiagramFormula:
    symbols = _field(data, "reduct", list)
    if not all(isinstance(s, str) and s in sig for s in symbols):
        raise SchemaError(f"reduct {symbols} is not part of the signature")
    reduct = sig.reduct(symbols)
    variables = tuple(str(v) for v in _field(data, "variables", list))
    conj = []
    for item in _field(data, "conjuncts", list):
        if not isinstance(item, str):
            raise SchemaError(f"conjuncts are strings, got {item!r}")
        try:
            conj.append(parse_atomic(item, reduct, variables))
        except (ParseError, SignatureError) as exc:
            raise SchemaError(f"bad conjunct {item!r}: {exc}") from None
    return DiagramFormula(reduct, variables, frozenset(conj))


def diagram_to_json(phi: DiagramFormula) -> dict:
    return {
        "reduct": list(phi.reduct.symbols),
        "variables": list(phi.variables),
        "conjuncts": [str(c) for c in phi.sorted_conjuncts()],
    }


def direct_system_from_json(doc: dict):
    """Either a :class:`FormulaDirectSystem` or an algebra system ``(indices, order, algebras, maps)``."""
    typ = _field(doc, "type", str)
    indices = [str(i) for i in _field(doc, "indices", list)]
    order = [tuple(str(x) for x in p) for p in _field(doc, "order", list)]
    if any(len(p) != 2 for p in order):
        raise SchemaError("order entries are pairs")
    if typ == "formulas":
        sig = signature_from_json(_field(doc, "signature", dict))
        formulas_raw = _field(doc, "formulas", dict)
        formulas = {}
        for i in indices:
            if i not in formulas_raw:
                raise SchemaError(f"no formula for index {i!r}")
            formulas[i] = _diagram_from_json(formulas_raw[i], sig)
        maps = {}
        for m in _field(doc, "maps", list):
            i, j = str(_field(m, "from")), str(_field(m, "to"))
            if i not in formulas or j not in formulas:
                raise SchemaError(f"map between unknown indices {i!r}, {j!r}")
            try:
                maps[(i, j)] = VariableMap(formulas[i].variables, formulas[j].variables, _field(m, "map", dict))
            except ValueError as exc:
                raise SchemaError(f"bad map {i!r} -> {j!r}: {exc}") from None
        return FormulaDirectSystem(sig, tuple(indices), frozenset(order), formulas, maps)
    if typ == "algebras":
        raw = _field(doc, "algebras", dict)
        algebras = {}
        for i in indices:
            if i not in raw:
                raise SchemaError(f"no algebra for index {i!r}")
            algebras[i] = algebra_from_json(raw[i])
        homs = {}
        for m in _field(doc, "maps", list):
            homs[(str(_field(m, "from")), str(_field(m, "to")))] = tuple(int(v) for v in _field(m, "map", list))
        return indices, order, algebras, homs
    raise SchemaError(f"unknown direct-system type {typ!r}")


def direct_system_document(L: FormulaDirectSystem) -> dict:
    return _wrap("direct-system", {
        "type": "formulas",
        "signature": signature_to_json(L.signature),
        "indices": [str(i) for i in L.indices],
        "order": sorted([str(a), str(b)] for a, b in L.order),
        "formulas": {str(i): diagram_to_json(L.formulas[i]) for i in L.indices},
        "maps": [
            {"from": str(i), "to": str(j), "map": dict(L.gamma(i, j).mapping)}
            for i in L.indices for j in L.indices if (i, j) in L.order
        ],
    })


# ---------------------------------------------------------------------------
# congruences and filters


def congruence_from_json(doc: dict, B: FiniteAlgebra):
    from .algebra import Congruence

    try:
        if "classes" in doc:
            return Congruence.from_classes(B, [[int(m) for m in c] for c in doc["classes"]])
        if "pairs" in doc:
            return Congruence.generated(B, [(int(a), int(b)) for a, b in doc["pairs"]])
    except (TypeError, ValueError, IndexError) as exc:
        raise SchemaError(f"bad congruence: {exc}") from None
    raise SchemaError("a congruence document lists 'classes' or generating 'pairs'")


def filter_from_json(doc: dict, n: int) -> list[frozenset]:
    from .algebra import principal_filter

    if "principal" in doc:
        gen = [int(i) for i in doc["principal"]]
        if any(not 0 <= i < n for i in gen):
            raise SchemaError("filter generator outside the index set")
        return principal_filter(range(n), gen)
    sets = _field(doc, "sets", list)
    return [frozenset(int(i) for i in s) for s in sets]


def report(command: str, inputs: dict[str, str], seed: int, result: Any) -> dict:
    return _wrap("report", {"command": command, "inputs": dict(sorted(inputs.items())), "seed": seed, "result": result})

