"""Pure-Python implementations of the inner loops (reference and fallback)."""

import itertools

OP_VAR, OP_CONST, OP_APPLY = 0, 1, 2


def _closure(code, start, stop, tables, offsets, arities, k):
    """Turn a postfix program into a function of the point tuple."""
    stack = []
    for pc in range(start, stop, 2):
        op, arg = code[pc], code[pc + 1]
        if op == OP_VAR:
            stack.append(lambda p, i=arg: p[i])
        elif op == OP_CONST:
            stack.append(lambda p, v=arg: v)
        else:
            a = arities[arg]
            args = stack[len(stack) - a:]
            del stack[len(stack) - a:]
            off = offsets[arg]
            if a == 1:
                (f0,) = args
                stack.append(lambda p, f0=f0, off=off: tables[off + f0(p)])
            elif a == 2:
                f0, f1 = args
                stack.append(lambda p, f0=f0, f1=f1, off=off: tables[off + f0(p) * k + f1(p)])
            else:
                def g(p, args=tuple(args), off=off):
                    idx = 0
                    for f in args:
                        idx = idx * k + f(p)
                    return tables[off + idx]
                stack.append(g)
    return stack[0]


def solve_points(k, n, tables, offsets, arities, code, starts, stack_size):
    m = (len(starts) - 1) // 2
    tests = [
        (_closure(code, starts[2 * e], starts[2 * e + 1], tables, offsets, arities, k),
         _closure(code, starts[2 * e + 1], starts[2 * e + 2], tables, offsets, arities, k))
        for e in range(m)
    ]
    out = []
    for idx, p in enumerate(itertools.product(range(k), repeat=n)):
        for left, right in tests:
            if left(p) != right(p):
                break
        else:
            out.append(idx)
    return out


def check_homomorphism(mapping, k_src, k_tgt, src_tables, tgt_tables, src_offsets, tgt_offsets, arities):
    for f, a in enumerate(arities):
        so, to = src_offsets[f], tgt_offsets[f]
        for idx, tup in enumerate(itertools.product(range(k_src), repeat=a)):
            tidx = 0
            for x in tup:
                tidx = tidx * k_tgt + mapping[x]
            if mapping[src_tables[so + idx]] != tgt_tables[to + tidx]:
                return False
    return True
