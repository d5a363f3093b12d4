# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration kernels.  Same contract as ``_kernels_py``."""

from libc.stdlib cimport malloc, free

cdef unsigned long long _FACT[21]
_FACT[0] = 1
for _i in range(1, 21):
    _FACT[_i] = _FACT[_i - 1] * _i


cdef list _tables(int r, int c, int* rows, int* cols):
    cdef int n = r * c
    cdef list out = []
    cdef int total_r = 0, total_c = 0, i, j, k, hi, lo, cap, v
    for i in range(r):
        total_r += rows[i]
    for j in range(c):
        total_c += cols[j]
    if total_r != total_c:
        return out
    if n == 0:
        if total_r == 0:
            out.append(())
        return out

    cdef int* val = <int*> malloc(n * sizeof(int))
    cdef int* low = <int*> malloc(n * sizeof(int))
    cdef int* colrem = <int*> malloc(c * sizeof(int))
    cdef int* rowrem = <int*> malloc(r * sizeof(int))
    cdef bint entering = True
    try:
        for j in range(c):
            colrem[j] = cols[j]
        for i in range(r):
            rowrem[i] = rows[i]
        k = 0
        while True:
            if entering:
                if k == n:
                    out.append(tuple([val[i] for i in range(n)]))
                    k -= 1
                    entering = False
                    continue
                i = k // c
                j = k % c
                if j == c - 1:
                    hi = rowrem[i]
                    lo = hi
                else:
                    cap = 0
                    for v in range(j + 1, c):
                        cap += colrem[v]
                    hi = rowrem[i] if rowrem[i] < colrem[j] else colrem[j]
                    lo = rowrem[i] - cap
                    if lo < 0:
                        lo = 0
                low[k] = lo
                val[k] = hi
                rowrem[i] -= hi
                colrem[j] -= hi
                k += 1
            else:
                if k < 0:
                    break
                i = k // c
                j = k % c
                rowrem[i] += val[k]
                colrem[j] += val[k]
                val[k] -= 1
                if val[k] < low[k]:
                    k -= 1
                    continue
                rowrem[i] -= val[k]
                colrem[j] -= val[k]
                k += 1
                entering = True
    finally:
        free(val)
        free(low)
        free(colrem)
        free(rowrem)
    return out


def contingency_tables(rows, cols):
    cdef int r = len(rows), c = len(cols), i
    cdef int* rr = <int*> malloc((r + 1) * sizeof(int))
    cdef int* cc = <int*> malloc((c + 1) * sizeof(int))
    try:
        for i in range(r):
            rr[i] = rows[i]
        for i in range(c):
            cc[i] = cols[i]
        return _tables(r, c, rr, cc)
    finally:
        free(rr)
        free(cc)


def count_tables(rows, cols):
    return len(contingency_tables(rows, cols))


def transport_compose(G, H, int nt, int ns, int nu):
    cdef int size = nt * nu, s, t, u, k, m, total = 0
    cdef list slices = []
    cdef list tabs
    for k in range(nt * ns):
        total += G[k]
    if total > 20:
        from multisch._kernels_py import transport_compose as slow
        return slow(G, H, nt, ns, nu)
    for s in range(ns):
        tabs = contingency_tables([G[t * ns + s] for t in range(nt)],
                                  [H[s * nu + u] for u in range(nu)])
        if not tabs:
            return {}
        slices.append(tabs)
    if ns == 0:
        return {tuple([0] * size): 1}

    cdef int* lens = <int*> malloc(ns * sizeof(int))
    cdef int* idx = <int*> malloc(ns * sizeof(int))
    cdef int* flat = NULL
    cdef int* W = <int*> malloc((size + 1) * sizeof(int))
    cdef int* offs = <int*> malloc(ns * sizeof(int))
    cdef int n_all = 0
    cdef unsigned long long num, den
    cdef dict out = {}
    cdef tuple z
    try:
        for s in range(ns):
            lens[s] = len(slices[s])
            offs[s] = n_all
            n_all += lens[s]
        flat = <int*> malloc((n_all * size + 1) * sizeof(int))
        m = 0
        for s in range(ns):
            for z in slices[s]:
                for k in range(size):
                    flat[m * size + k] = z[k]
                m += 1
        for s in range(ns):
            idx[s] = 0
        while True:
            for k in range(size):
                W[k] = 0
            den = 1
            for s in range(ns):
                m = (offs[s] + idx[s]) * size
                for k in range(size):
                    W[k] += flat[m + k]
                    den *= _FACT[flat[m + k]]
            num = 1
            for k in range(size):
                num *= _FACT[W[k]]
            key = tuple([W[k] for k in range(size)])
            out[key] = out.get(key, 0) + <object>(num // den)
            s = ns - 1
            while s >= 0:
                idx[s] += 1
                if idx[s] < lens[s]:
                    break
                idx[s] = 0
                s -= 1
            if s < 0:
                break
    finally:
        free(lens)
        free(idx)
        free(W)
        free(offs)
        if flat != NULL:
            free(flat)
    return out
