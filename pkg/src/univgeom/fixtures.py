"""Small named algebras shared by the tests, the corpus and the CLI."""

from __future__ import annotations

import itertools
import random

from .algebra import FiniteAlgebra, direct_product, trivial_algebra
from .syntax import Signature

SEMILATTICE = Signature((("meet", 2),), ())
UNARY = Signature((("f", 1),), ())
TWO_CONSTANTS = Signature((), ("c0", "c1"))
GROUP = Signature((("mul", 2), ("inv", 1)), ("e",))
GROUPOID = Signature((("op", 2),), ())


def cyclic_group(n: int) -> FiniteAlgebra:
    mul = [(a + b) % n for a in range(n) for b in range(n)]
    inv = [(-a) % n for a in range(n)]
    return FiniteAlgebra(GROUP, n, {"mul": mul, "inv": inv}, {"e": 0}, f"Z{n}")


def semilattice2() -> FiniteAlgebra:
    return FiniteAlgebra(SEMILATTICE, 2, {"meet": [min(a, b) for a in range(2) for b in range(2)]}, name="S2")


def unary_algebra(values, name: str = "") -> FiniteAlgebra:
    values = list(values)
    return FiniteAlgebra(UNARY, len(values), {"f": values}, name=name or "U" + "".join(map(str, values)))


def negation2() -> FiniteAlgebra:
    return unary_algebra((1, 0), "N2")


def two_constants() -> FiniteAlgebra:
    return FiniteAlgebra(TWO_CONSTANTS, 2, {}, {"c0": 0, "c1": 1}, "C01")


def klein_group() -> FiniteAlgebra:
    Z2 = cyclic_group(2)
    return direct_product([Z2, Z2], name="V4")[0]


def unary_algebras(size: int = 2) -> list[FiniteAlgebra]:
    """Every algebra of one unary symbol on ``size`` elements, in lexicographic table order."""
    return [unary_algebra(t) for t in itertools.product(range(size), repeat=size)]


def random_groupoid(seed: int, size: int = 3) -> FiniteAlgebra:
    rng = random.Random(seed)
    table = [rng.randrange(size) for _ in range(size * size)]
    return FiniteAlgebra(GROUPOID, size, {"op": table}, name=f"G{size}_{seed}")


def standard() -> dict[str, FiniteAlgebra]:
    """The named fixtures, trivial algebras suffixed by their signature."""
    out = {
        "S2": semilattice2(),
        "N2": negation2(),
        "C01": two_constants(),
        "Z2": cyclic_group(2),
        "Z3": cyclic_group(3),
        "Z4": cyclic_group(4),
        "V4": klein_group(),
    }
    for label, sig in (("meet", SEMILATTICE), ("unary", UNARY), ("const", TWO_CONSTANTS),
                       ("group", GROUP), ("groupoid", GROUPOID)):
        out[f"E_{label}"] = trivial_algebra(sig)
    return out
