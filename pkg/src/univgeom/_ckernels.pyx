# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops; semantics mirror ``_pykernels`` exactly."""

from libc.stdlib cimport malloc, free

cdef enum:
    OP_VAR = 0
    OP_CONST = 1
    OP_APPLY = 2


cdef long* _copy(object seq, Py_ssize_t* length) except NULL:
    cdef Py_ssize_t n = len(seq), i
    cdef long* out = <long*> malloc((n + 1) * sizeof(long))
    if out == NULL:
        raise MemoryError()
    for i in range(n):
        out[i] = seq[i]
    length[0] = n
    return out


cdef inline long _eval(long* code, Py_ssize_t start, Py_ssize_t stop, long* point,
                       long* tables, long* offsets, long* arities, long k, long* stack) nogil:
    cdef Py_ssize_t pc = start, sp = 0
    cdef long op, arg, idx, j, a
    while pc < stop:
        op = code[pc]
        arg = code[pc + 1]
        pc += 2
        if op == OP_VAR:
            stack[sp] = point[arg]
            sp += 1
        elif op == OP_CONST:
            stack[sp] = arg
            sp += 1
        else:
            a = arities[arg]
            idx = 0
            for j in range(sp - a, sp):
                idx = idx * k + stack[j]
            sp -= a
            stack[sp] = tables[offsets[arg] + idx]
            sp += 1
    return stack[0]


def solve_points(long k, long n, tables, offsets, arities, code, starts, long stack_size):
    """Indices (row-major, first variable most significant) of points satisfying every equation.

    ``starts`` holds 2*m+1 boundaries into ``code``: equation e has its left
    program in ``code[starts[2e]:starts[2e+1]]`` and its right program in
    ``code[starts[2e+1]:starts[2e+2]]``.
    """
    cdef Py_ssize_t nt, no, na, nc, ns
    cdef long* t = _copy(tables, &nt)
    cdef long* o = _copy(offsets, &no)
    cdef long* ar = _copy(arities, &na)
    cdef long* c = _copy(code, &nc)
    cdef long* s = _copy(starts, &ns)
    cdef long* point = <long*> malloc((n + 1) * sizeof(long))
    cdef long* stack = <long*> malloc((stack_size + 1) * sizeof(long))
    cdef long total = 1, idx, e, m = (ns - 1) // 2, i, left, right
    cdef bint ok
    out = []
    try:
        for i in range(n):
            total *= k
            point[i] = 0
        for idx in range(total):
            ok = True
            for e in range(m):
                left = _eval(c, s[2 * e], s[2 * e + 1], point, t, o, ar, k, stack)
                right = _eval(c, s[2 * e + 1], s[2 * e + 2], point, t, o, ar, k, stack)
                if left != right:
                    ok = False
                    break
            if ok:
                out.append(idx)
            i = n - 1
            while i >= 0:
                point[i] += 1
                if point[i] < k:
                    break
                point[i] = 0
                i -= 1
    finally:
        free(t); free(o); free(ar); free(c); free(s); free(point); free(stack)
    return out


def check_homomorphism(mapping, long k_src, long k_tgt, src_tables, tgt_tables, src_offsets,
                       tgt_offsets, arities):
    """True iff ``mapping`` commutes with every operation table (constants are checked by the caller)."""
    cdef Py_ssize_t nm, ns, ntt, nso, nto, na
    cdef long* h = _copy(mapping, &nm)
    cdef long* st = _copy(src_tables, &ns)
    cdef long* tt = _copy(tgt_tables, &ntt)
    cdef long* so = _copy(src_offsets, &nso)
    cdef long* to = _copy(tgt_offsets, &nto)
    cdef long* ar = _copy(arities, &na)
    cdef long* tup = <long*> malloc(64 * sizeof(long))
    cdef Py_ssize_t f
    cdef long a, total, idx, tidx, j, i
    cdef bint ok = True
    try:
        for f in range(na):
            a = ar[f]
            if a > 63:
                raise ValueError("arity too large for the compiled kernel")
            total = 1
            for j in range(a):
                total *= k_src
                tup[j] = 0
            for idx in range(total):
                tidx = 0
                for j in range(a):
                    tidx = tidx * k_tgt + h[tup[j]]
                if h[st[so[f] + idx]] != tt[to[f] + tidx]:
                    ok = False
                    break
                i = a - 1
                while i >= 0:
                    tup[i] += 1
                    if tup[i] < k_src:
                        break
                    tup[i] = 0
                    i -= 1
            if not ok:
                break
    finally:
        free(h); free(st); free(tt); free(so); free(to); free(ar); free(tup)
    return ok
