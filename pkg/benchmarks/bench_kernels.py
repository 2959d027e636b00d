"""Time the compiled and pure-Python kernels on the same inputs.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import itertools
import timeit

from univgeom import _pykernels
from univgeom import fixtures as fx
from univgeom.geometry import _compile
from univgeom.syntax import parse_atomic

try:
    from univgeom import _ckernels
except ImportError:
    _ckernels = None


def solve_args(B, equations, variables):
    var_index = {v: i for i, v in enumerate(variables)}
    fn_index = {f: i for i, (f, _) in enumerate(B.sig.functions)}
    code, starts, stack = [], [0], 1
    for text in equations:
        eq = parse_atomic(text, B.sig, variables)
        for side in (eq.left, eq.right):
            stack = max(stack, _compile(side, B, var_index, fn_index, code))
            starts.append(len(code))
    tables, offsets, arities = B.flat
    return (B.size, len(variables), tables, offsets, arities, code, starts, stack)


def hom_args(C, B):
    sflat, soff, arities = C.flat
    tflat, toff, _ = B.flat
    maps = list(itertools.product(range(B.size), repeat=C.size))
    return [(list(m), C.size, B.size, sflat, tflat, soff, toff, arities) for m in maps]


CASES = {
    "solve Z4^6, 2 equations": (
        "solve_points",
        [solve_args(fx.cyclic_group(4), ["mul(mul(x,y),mul(z,u)) = inv(mul(w,v))", "mul(x,x) = mul(y,inv(v))"],
                    ["x", "y", "z", "w", "u", "v"])],
    ),
    "solve groupoid^8, 1 equation": (
        "solve_points",
        [solve_args(fx.random_groupoid(7), ["op(op(x,y),op(z,w)) = op(op(u,v),op(s,t))"],
                    ["x", "y", "z", "w", "u", "v", "s", "t"])],
    ),
    "all maps V4 -> Z4": ("check_homomorphism", hom_args(fx.klein_group(), fx.cyclic_group(4))),
}


def normal(out):
    return bool(out) if isinstance(out, (bool, int)) else list(out)


def bench(module, fn, inputs, repeat):
    f = getattr(module, fn)
    return min(timeit.repeat(lambda: [f(*a) for a in inputs], number=1, repeat=repeat))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _ckernels is None:
        print("compiled kernels are not built; only the pure backend is timed")
    print(f"{'case':32} {'python (s)':>12} {'cython (s)':>12} {'speedup':>8}")
    for name, (fn, inputs) in CASES.items():
        py = bench(_pykernels, fn, inputs, args.repeat)
        if _ckernels is None:
            print(f"{name:32} {py:12.4f} {'-':>12} {'-':>8}")
            continue
        cy = bench(_ckernels, fn, inputs, args.repeat)
        # both backends must return the same answers
        for a in inputs[:50]:
            assert normal(getattr(_ckernels, fn)(*a)) == normal(getattr(_pykernels, fn)(*a))
        print(f"{name:32} {py:12.4f} {cy:12.4f} {py / cy:7.1f}x")


if __name__ == "__main__":
    main()
