"""Finite universal algebra and algebraic geometry over finite algebras."""

from ._config import universe_bound
from .algebra import (
    CoefficientStructure,
    Congruence,
    FiniteAlgebra,
    Homomorphism,
    direct_product,
    enumerate_homomorphisms,
    filterproduct,
    find_isomorphism,
    quotient,
)
from .errors import BoundExceeded, SchemaError, SignatureError, UnivGeomError
from .geometry import AlgebraicSet, EquationSystem, coordinate_algebra, decompose, is_irreducible, solve
from .kernels import BACKEND
from .syntax import AtomicFormula, Signature, parse_atomic, parse_sentence, parse_term
from .unification import theorem_a_check, theorem_b_check

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AlgebraicSet",
    "AtomicFormula",
    "BoundExceeded",
    "CoefficientStructure",
    "Congruence",
    "EquationSystem",
    "FiniteAlgebra",
    "Homomorphism",
    "SchemaError",
    "Signature",
    "SignatureError",
    "UnivGeomError",
    "coordinate_algebra",
    "decompose",
    "direct_product",
    "enumerate_homomorphisms",
    "filterproduct",
    "find_isomorphism",
    "is_irreducible",
    "parse_atomic",
    "parse_sentence",
    "parse_term",
    "quotient",
    "solve",
    "theorem_a_check",
    "theorem_b_check",
    "universe_bound",
]
