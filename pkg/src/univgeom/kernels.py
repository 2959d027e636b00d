"""Backend selection for the inner loops.

The compiled extension is used when it was built; setting the environment
variable ``UNIVGEOM_PURE=1`` forces the pure-Python implementation.
"""

import os

from . import _pykernels as pure

try:
    if os.environ.get("UNIVGEOM_PURE"):
        raise ImportError("pure backend requested")
    from . import _ckernels as compiled
except ImportError:
    compiled = None

_impl = compiled if compiled is not None else pure
BACKEND = "cython" if compiled is not None else "python"

OP_VAR, OP_CONST, OP_APPLY = pure.OP_VAR, pure.OP_CONST, pure.OP_APPLY


def solve_points(*args):
    return _impl.solve_points(*args)


def check_homomorphism(*args):
    return _impl.check_homomorphism(*args)
