import json
import os
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from strategies import terms
from univgeom import _pykernels, kernels
from univgeom import fixtures as fx
from univgeom.geometry import _compile
from univgeom.syntax import AtomicFormula

compiled = pytest.importorskip("univgeom._ckernels", reason="compiled backend not built")

XYZ = ("x", "y", "z")
ALGEBRAS = list(fx.standard().values()) + [fx.random_groupoid(3)]


def compiled_system(B, equations, variables):
    var_index = {v: i for i, v in enumerate(variables)}
    fn_index = {f: i for i, (f, _) in enumerate(B.sig.functions)}
    code, starts, stack = [], [0], 1
    for eq in equations:
        for side in (eq.left, eq.right):
            stack = max(stack, _compile(side, B, var_index, fn_index, code))
            starts.append(len(code))
    tables, offsets, arities = B.flat
    return (B.size, len(variables), tables, offsets, arities, code, starts, stack)


def systems():
    def for_algebra(B):
        eq = st.builds(AtomicFormula, terms(B.sig, XYZ, 3), terms(B.sig, XYZ, 3))
        return st.tuples(st.just(B), st.lists(eq, max_size=4), st.integers(1, 3))

    return st.sampled_from(ALGEBRAS).flatmap(for_algebra)


@given(systems())
def test_solve_kernels_agree(case):
    B, eqs, n = case
    variables = XYZ[:n]
    eqs = [e for e in eqs if (e.left.variables() | e.right.variables()) <= set(variables)]
    args = compiled_system(B, eqs, variables)
    assert list(compiled.solve_points(*args)) == list(_pykernels.solve_points(*args))


@given(st.sampled_from(ALGEBRAS).flatmap(lambda C: st.sampled_from([B for B in ALGEBRAS if B.sig == C.sig]).flatmap(
    lambda B: st.tuples(st.just(C), st.just(B), st.lists(st.integers(0, B.size - 1), min_size=C.size, max_size=C.size)))))
def test_homomorphism_kernels_agree(case):
    C, B, mapping = case
    sflat, soff, arities = C.flat
    tflat, toff, _ = B.flat
    args = (mapping, C.size, B.size, sflat, tflat, soff, toff, arities)
    assert bool(compiled.check_homomorphism(*args)) == bool(_pykernels.check_homomorphism(*args))


def test_default_backend_is_compiled():
    if os.environ.get("UNIVGEOM_PURE"):
        pytest.skip("pure backend forced by the environment")
    assert kernels.BACKEND == "cython"


SCRIPT = """
import json
from univgeom import fixtures as fx, kernels
from univgeom.geometry import EquationSystem, solve
from univgeom.syntax import parse_atomic
from univgeom.algebra import enumerate_homomorphisms
B = fx.cyclic_group(4)
S = EquationSystem(B.sig, ("x", "y"), (parse_atomic("mul(x,x) = y", B.sig, ["x", "y"]),))
print(json.dumps([kernels.BACKEND, solve(S, B).points, [h.map for h in enumerate_homomorphisms(B, fx.klein_group())]]))
"""


def test_forced_pure_backend_gives_same_answers():
    runs = []
    for pure in (True, False):
        env = dict(os.environ)
        env.pop("UNIVGEOM_PURE", None)
        if pure:
            env["UNIVGEOM_PURE"] = "1"
        out = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True, check=True)
        runs.append(json.loads(out.stdout))
    assert runs[0][0] == "python" and runs[1][0] == "cython"
    assert runs[0][1:] == runs[1][1:]
