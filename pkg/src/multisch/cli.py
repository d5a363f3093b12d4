"""Command-line interface: ``multisch <command> ...``.

Exit codes: 0 success, 1 internal invariant violation, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Callable

from multisch import gamma, plocal, schurcat, serialize as ser
from multisch.exactlin import FPModule, zeros
from multisch.multijection import (
    all_multijections,
    degree,
    orbit_pullback_oracle,
    pullback_components,
)
from multisch.multiset import Multiset, ParseError, factorial as ms_factorial, partitions, representative
from multisch.rings import ZZ, RingError, ring_from_tag
from multisch.schurcat import GraphMorphism, SchMorphism


class InputError(Exception):
    pass


# -- output -----------------------------------------------------------------

def emit(payload: dict, args, text: Callable[[dict], str]) -> None:
    if args.format == "json":
        out = json.dumps(payload, indent=2, sort_keys=args.sorted, ensure_ascii=False)
    else:
        out = text(payload)
    sys.stdout.write(out + "\n")


def table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in headers]
    for r in rows:
        widths = [max(w, len(c)) for w, c in zip(widths, r)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    return "\n".join(lines)


def graph_text(g: GraphMorphism) -> str:
    if g.entries == schurcat.identity_graph(g.source).entries and g.source == g.target:
        return "id"
    return "[" + "; ".join(" ".join(str(v) for v in r) for r in g.entries) + "]"


def morphism_text(x: SchMorphism) -> str:
    if not x.terms:
        return "0"
    parts = []
    for g, c in x.terms.items():
        parts.append(f"{x.ring.format(c)}·{graph_text(g)}")
    return " + ".join(parts)


def envelope(command: str, **fields) -> dict:
    return {"version": ser.VERSION, "command": command, **fields}


# -- input helpers ----------------------------------------------------------

def parse_ms(text: str) -> Multiset:
    try:
        return Multiset.parse(text)
    except ParseError as exc:
        raise InputError(str(exc)) from exc


def load_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {path}: {exc}") from exc


def get_ring(args):
    if getattr(args, "ring", None) is None:
        return None
    try:
        return ring_from_tag(args.ring)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def load_fpmodule(d: dict, ring) -> FPModule:
    try:
        rank = int(d["rank"])
        rel = ser.matrix_from_json(d.get("relations", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad module: {exc}") from exc
    if rel and len(rel) != rank:
        raise InputError("module relations need one row per generator")
    return FPModule(rank, rel if rel and rel[0] else zeros(rank, 0), ring or ZZ)


# -- commands ---------------------------------------------------------------

def cmd_hom(args) -> int:
    beta, alpha = parse_ms(args.source), parse_ms(args.target)
    ring = get_ring(args) or ZZ
    graphs = []
    for g in schurcat.hom_basis(beta, alpha):
        sp = g.span()
        graphs.append({"graph": ser.graph_to_json(g), "apex": str(sp.apex),
                       "deg_pull": str(degree(sp.left)), "deg_push": str(degree(sp.right))})
    payload = envelope("hom", source=str(beta), target=str(alpha), ring=ring.tag,
                       count=len(graphs), graphs=graphs)

    def text(p):
        rows = [[str(i), graph_text(ser.graph_from_json(gr["graph"])), gr["apex"],
                 gr["deg_pull"], gr["deg_push"]] for i, gr in enumerate(p["graphs"])]
        head = f"Hom({p['source']}, {p['target']}): {p['count']} graphs"
        return head + ("\n" + table(["#", "entries", "apex", "deg pull", "deg push"], rows) if rows else "")

    emit(payload, args, text)
    return 0


def cmd_compose(args) -> int:
    d = load_json(args.file)
    ring = get_ring(args)
    try:
        inner = ser.morphism_from_json(d["inner"], ring)
        outer = ser.morphism_from_json(d["outer"], ring or inner.ring)
        if ring is None and inner.ring != outer.ring:
            outer = outer.change_ring(inner.ring)
        result = schurcat.compose(outer, inner)
    except (KeyError, TypeError) as exc:
        raise InputError(f"compose input needs 'inner' and 'outer' morphisms ({exc})") from exc
    payload = envelope("compose", result=ser.morphism_to_json(result), text=morphism_text(result))
    emit(payload, args, lambda p: p["text"])
    return 0


def cmd_realize(args) -> int:
    d = load_json(args.file)
    x = ser.morphism_from_json(d.get("morphism", d), get_ring(args))
    if args.width < 0:
        raise InputError("width must be nonnegative")
    R = gamma.realize(x, args.width)
    src, tgt = gamma.basis(x.source, args.width), gamma.basis(x.target, args.width)
    payload = envelope("realize", source=str(x.source), target=str(x.target), width=args.width,
                       ring=x.ring.tag,
                       source_basis=[[list(r) for r in e] for e in src.basis],
                       target_basis=[[list(r) for r in e] for e in tgt.basis],
                       matrix=ser.matrix_to_json(R.to_dense()))

    def text(p):
        rows = [[ser.value_to_json(v) for v in r] for r in R.to_dense()]
        w = max((len(c) for r in rows for c in r), default=1)
        body = "\n".join(" ".join(c.rjust(w) for c in r) for r in rows)
        return f"Γ^{p['source']}(Z^{p['width']}) -> Γ^{p['target']}(Z^{p['width']}):\n{body}"

    emit(payload, args, text)
    return 0


# verify suites

def _suite_hecke(max_card: int) -> tuple[int, list[str]]:
    n_checks, fails = 0, []
    for n in range(max_card + 1):
        for mu in partitions(n):
            for lam in partitions(n):
                for f in all_multijections(representative(mu), representative(lam)):
                    lhs = schurcat.compose(schurcat.lowerstar(f), schurcat.upperstar(f))
                    d = degree(f)
                    n_checks += 1
                    if d != ms_factorial(f.target) // ms_factorial(f.source) or \
                            lhs != schurcat.identity(f.target).scale(d):
                        fails.append(str(f))
    return n_checks, fails


def _graph_pairs(max_card: int):
    for n in range(max_card + 1):
        shapes = [representative(l) for l in partitions(n)]
        for b in shapes:
            for a in shapes:
                for e in shapes:
                    for g in schurcat.hom_basis(b, a):
                        for h in schurcat.hom_basis(a, e):
                            yield n, g, h


def _suite_functor(max_card: int) -> tuple[int, list[str]]:
    n_checks, fails = 0, []
    for n, g, h in _graph_pairs(max_card):
        if n > 3:
            continue
        comp = schurcat.compose(SchMorphism.of(h), SchMorphism.of(g))
        n_checks += 1
        if gamma.realize(comp, n) != gamma.realize_graph(h, n) @ gamma.realize_graph(g, n):
            fails.append(f"{h} after {g}")
    # cardinality 4 and above: a fixed pseudorandom sample
    rng = random.Random(20240501)
    for n in range(4, max_card + 1):
        shapes = [representative(l) for l in partitions(n)]
        for _ in range(40):
            b, a, e = (rng.choice(shapes) for _ in range(3))
            g = rng.choice(schurcat.hom_basis(b, a))
            h = rng.choice(schurcat.hom_basis(a, e))
            comp = schurcat.compose(SchMorphism.of(h), SchMorphism.of(g))
            n_checks += 1
            if gamma.realize(comp, n) != gamma.realize_graph(h, n) @ gamma.realize_graph(g, n):
                fails.append(f"{h} after {g}")
    return n_checks, fails


def _suite_assoc(max_card: int) -> tuple[int, list[str]]:
    rng = random.Random(7)
    n_checks, fails = 0, []
    for n in range(1, max_card + 1):
        shapes = [representative(l) for l in partitions(n)]
        for _ in range(30):
            o = [rng.choice(shapes) for _ in range(4)]
            f, g, h = (SchMorphism.of(rng.choice(schurcat.hom_basis(o[i], o[i + 1]))) for i in range(3))
            n_checks += 1
            c = schurcat.compose
            if c(h, c(g, f)) != c(c(h, g), f):
                fails.append(f"{f} ; {g} ; {h}")
    return n_checks, fails


def _suite_preduce(max_card: int) -> tuple[int, list[str]]:
    n_checks, fails = 0, []
    for n in range(1, max_card + 1):
        for lam in partitions(n):
            for p in (2, 3, 5):
                red = plocal.p_reduce(representative(lam), p)
                n_checks += 1
                res = plocal.check_splitting(red)
                if not all(res.values()):
                    fails.append(f"{list(lam)} p={p}: {res}")
    return n_checks, fails


def _suite_pullback(max_card: int) -> tuple[int, list[str]]:
    def key(sp):
        l, r = sp.left.map, sp.right.map
        return sorted((l[q], r[q], sp.apex.mult(q)) for q in sp.apex.support)

    n_checks, fails = 0, []
    for n in range(min(max_card, 6) + 1):
        for lam in partitions(n):
            C = representative(lam)
            legs = [f for mu in partitions(n) for f in all_multijections(representative(mu), C)]
            for f in legs:
                for g in legs:
                    a = sorted(key(s) for s in pullback_components(f, g))
                    b = sorted(key(s) for s in orbit_pullback_oracle(f, g))
                    n_checks += 1
                    if a != b:
                        fails.append(f"{f} / {g}")
    return n_checks, fails


SUITES = {
    "hecke": _suite_hecke,
    "functor": _suite_functor,
    "assoc": _suite_assoc,
    "preduce": _suite_preduce,
    "pullback": _suite_pullback,
}


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = []
    for name in names:
        n_checks, fails = SUITES[name](args.max_card)
        results.append({"suite": name, "max_card": args.max_card, "checks": n_checks,
                        "failures": len(fails), "status": "pass" if not fails else "fail",
                        "examples": fails[:5]})
    payload = envelope("verify", results=results)

    def text(p):
        return table(["suite", "max card", "checks", "failures", "status"],
                     [[r["suite"], str(r["max_card"]), str(r["checks"]), str(r["failures"]), r["status"]]
                      for r in p["results"]])

    emit(payload, args, text)
    return 0 if all(r["status"] == "pass" for r in results) else 1


def cmd_reduce(args) -> int:
    alpha = parse_ms(args.alpha)
    if args.char0:
        red = plocal.char0_reduce(alpha)
    else:
        try:
            red = plocal.p_reduce(alpha, args.p)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    ring = get_ring(args) or plocal.default_ring(red)
    try:
        e = plocal.split_idempotent(red, ring)
    except RingError as exc:
        raise InputError(f"degree {red.d} is not invertible in {ring.tag}: {exc}") from exc
    checks = plocal.check_splitting(red, ring)
    payload = envelope("reduce", **red.to_json(), ring=ring.tag,
                       idempotent=ser.morphism_to_json(e), idempotent_text=morphism_text(e),
                       checks=checks)

    def text(p):
        rows = [["alpha", p["alpha"]], ["alpha'", p["alpha_prime"]],
                ["map", ", ".join(f"{k}->{v}" for k, v in p["map"].items())],
                ["d", p["d"]], ["ring", p["ring"]], ["e", p["idempotent_text"]]]
        rows += [[k, "ok" if v else "FAIL"] for k, v in p["checks"].items()]
        return table(["field", "value"], rows)

    emit(payload, args, text)
    return 0 if all(checks.values()) else 1


def cmd_gamma(args) -> int:
    ring = get_ring(args)
    if args.presentation is not None:
        K = load_fpmodule(load_json(args.presentation), ring)
        if args.degree is not None:
            if args.degree < 0:
                raise InputError("degree must be nonnegative")
            mod = gamma.gamma_of_presentation(args.degree, K)
            what = f"Γ^{args.degree}"
        elif args.shape is not None:
            mod = gamma.gamma_shape_of_presentation(parse_ms(args.shape), K)
            what = f"Γ^{parse_ms(args.shape)}"
        else:
            raise InputError("--presentation needs --degree or --shape")
        payload = envelope("gamma", functor=what, input=K.describe(), module=mod.describe(),
                           generators=mod.rank, ring=mod.ring.tag)
        emit(payload, args, lambda p: f"{p['functor']}({p['input']}) = {p['module']}")
        return 0
    if args.shape is None or args.width is None:
        raise InputError("gamma needs --shape with --width, or --presentation")
    if args.width < 0:
        raise InputError("width must be nonnegative")
    shape = parse_ms(args.shape)
    sp = gamma.basis(shape, args.width)
    payload = envelope("gamma", shape=str(shape), width=args.width, rank=len(sp),
                       basis=[sp.monomial(i).to_json()["exps"] for i in range(len(sp))],
                       monomials=[str(sp.monomial(i)) for i in range(len(sp))])

    def text(p):
        rows = [[str(i), m] for i, m in enumerate(p["monomials"])]
        return f"Γ^{p['shape']}(Z^{p['width']}): rank {p['rank']}\n" + table(["#", "monomial"], rows)

    emit(payload, args, text)
    return 0


# -- parser -----------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "text"], default="text")
    common.add_argument("--sorted", action="store_true", help="sort JSON keys")
    common.add_argument("--ring", default=None, help="Z, Q, Zmod:m or Zlocal:p")

    p = _Parser(prog="multisch", description="Exact computations in the Schur category of multisets.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    h = sub.add_parser("hom", parents=[common], help="basis of graphs between two multisets")
    h.add_argument("source")
    h.add_argument("target")
    h.set_defaults(func=cmd_hom)

    c = sub.add_parser("compose", parents=[common], help="compose two morphisms from a JSON file")
    c.add_argument("file", help='JSON {"inner": g, "outer": h}; "-" reads stdin')
    c.set_defaults(func=cmd_compose)

    r = sub.add_parser("realize", parents=[common], help="matrix of a morphism on divided powers")
    r.add_argument("file")
    r.add_argument("--width", type=int, required=True)
    r.set_defaults(func=cmd_realize)

    v = sub.add_parser("verify", parents=[common], help="run an invariant suite")
    v.add_argument("--suite", required=True, choices=sorted(SUITES) + ["all"])
    v.add_argument("--max-card", type=int, default=4)
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("reduce", parents=[common], help="p-local or rational reduction")
    d.add_argument("alpha")
    grp = d.add_mutually_exclusive_group(required=True)
    grp.add_argument("--p", type=int)
    grp.add_argument("--char0", action="store_true")
    d.set_defaults(func=cmd_reduce)

    g = sub.add_parser("gamma", parents=[common], help="divided power spaces and modules")
    g.add_argument("--shape")
    g.add_argument("--width", type=int)
    g.add_argument("--degree", type=int)
    g.add_argument("--presentation")
    g.set_defaults(func=cmd_gamma)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help exits 0; usage errors exit 2
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (InputError, ser.SchemaError, ParseError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (ValueError, KeyError, TypeError, RingError) as exc:
        # malformed payloads surface as value errors from the constructors
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 2
    except AssertionError as exc:
        sys.stderr.write(f"internal invariant violated: {exc}\n")
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
