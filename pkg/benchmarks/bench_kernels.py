"""Compare the compiled and pure-Python enumeration kernels.

    python benchmarks/bench_kernels.py [--repeat N]

Each workload is run on both backends, outputs are checked equal, and the
best-of-N wall time is reported.
"""
from __future__ import annotations

import argparse
import timeit

from multisch import kernels


def workloads():
    # contingency tables with the margins of typical hom-set computations
    tables = [((3, 3), (2, 2, 2)), ((2, 2, 2), (2, 2, 2)), ((4, 3, 2), (3, 3, 2, 1)), ((3, 3, 3), (3, 3, 3))]
    for rows, cols in tables:
        yield f"tables {rows}x{cols}", "contingency_tables", (rows, cols)
        yield f"count {rows}x{cols}", "count_tables", (rows, cols)
    # transport tensors for composing graphs through a middle margin
    py = kernels.py_backend
    for mid_rows, mid_cols in [((2, 2), (2, 2)), ((3, 2, 1), (2, 2, 2)), ((2, 2, 2), (3, 3))]:
        G = py.contingency_tables(mid_rows, mid_cols)[0]   # source x middle
        H = py.contingency_tables(mid_cols, mid_rows)[-1]  # middle x target
        nt, ns, nu = len(mid_rows), len(mid_cols), len(mid_rows)
        yield f"transport {nt}x{ns}x{nu}", "transport_compose", (G, H, nt, ns, nu)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=20)
    args = ap.parse_args(argv)
    if kernels.c_backend is None:
        print("compiled backend not built; run `pip install -e . --no-build-isolation` first")
        return 1
    print(f"{'workload':<34}{'python ms':>12}{'cython ms':>12}{'speedup':>10}")
    for name, fn, fargs in workloads():
        py_fn = getattr(kernels.py_backend, fn)
        c_fn = getattr(kernels.c_backend, fn)
        assert py_fn(*fargs) == c_fn(*fargs), name
        t = {}
        for label, f in (("py", py_fn), ("c", c_fn)):
            best = min(timeit.repeat(lambda: f(*fargs), number=args.number, repeat=args.repeat))
            t[label] = 1000 * best / args.number
        print(f"{name:<34}{t['py']:>12.3f}{t['c']:>12.3f}{t['py'] / t['c']:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
