"""Pure-Python reference versions of the enumeration kernels.

The compiled module ``_ckernels`` exposes the same three functions with the
same output order; :mod:`multisch.kernels` picks one at import time.
"""
from __future__ import annotations

from itertools import product
from math import factorial


def contingency_tables(rows, cols):
    """All nonnegative integer matrices with row sums `rows` and column sums `cols`.

    Tables are flattened row-major and listed in descending lexicographic
    order.  Column capacities are tracked so that every partial fill extends
    to at least one table; there is no backtracking over dead ends.
    """
    rows = list(rows)
    cols = list(cols)
    r, c = len(rows), len(cols)
    if sum(rows) != sum(cols):
        return []
    if r * c == 0:
        return [()] if not any(rows) and not any(cols) else []
    out = []
    cell = [0] * (r * c)
    colrem = cols[:]

    def fill(i, j, rem):
        if j == c - 1:
            cell[i * c + j] = rem
            colrem[j] -= rem
            if i == r - 1:
                out.append(tuple(cell))
            else:
                fill(i + 1, 0, rows[i + 1])
            colrem[j] += rem
            return
        cap_after = sum(colrem[j + 1:])
        hi = min(rem, colrem[j])
        lo = max(0, rem - cap_after)
        k = i * c + j
        for v in range(hi, lo - 1, -1):
            cell[k] = v
            colrem[j] -= v
            fill(i, j + 1, rem - v)
            colrem[j] += v

    fill(0, 0, rows[0])
    return out


def count_tables(rows, cols):
    return len(contingency_tables(rows, cols))


def transport_compose(G, H, nt, ns, nu):
    """Structure constants of graph composition.

    `G` is an ``nt x ns`` margin matrix and `H` an ``ns x nu`` one, both
    flattened row-major.  Returns a dict mapping each flattened ``nt x nu``
    matrix ``W`` to its integer coefficient: the sum over transport tensors
    ``Z[t,s,u]`` (with ``sum_u Z = G[t,s]`` and ``sum_t Z = H[s,u]``) of
    ``prod_{t,u} W[t,u]! / prod_{t,s,u} Z[t,s,u]!``.
    """
    slices = []
    for s in range(ns):
        rows = [G[t * ns + s] for t in range(nt)]
        cols = [H[s * nu + u] for u in range(nu)]
        tabs = contingency_tables(rows, cols)
        if not tabs:
            return {}
        slices.append(tabs)
    size = nt * nu
    out = {}
    for combo in product(*slices):
        W = [0] * size
        den = 1
        for z in combo:
            for k in range(size):
                v = z[k]
                if v:
                    W[k] += v
                    if v > 1:
                        den *= factorial(v)
        num = 1
        for w in W:
            if w > 1:
                num *= factorial(w)
        key = tuple(W)
        out[key] = out.get(key, 0) + num // den
    return out
