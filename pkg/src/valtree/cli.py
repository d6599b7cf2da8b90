"""Command-line front end: `valtree <verb> [options]`.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple

from .arith import BranchParam, ValtreeError, fmt_q, parse_branch, parse_poly
from . import skp as S
from . import dualgraph as DG
from . import treemeasure as TM

_NAMED = re.compile(r"^\s*([A-Za-z_]\w*)\s*:(.*)$", re.S)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# input helpers


def parse_named_branch(text: str, default: str) -> Tuple[str, BranchParam]:
    """'C: n=2; y=t^3' -> ('C', branch); an unnamed branch gets `default`."""
    m = _NAMED.match(text)
    if m and "=" not in m.group(1):
        return m.group(1), parse_branch(m.group(2))
    return default, parse_branch(text)


def _branches(args) -> List[Tuple[str, BranchParam]]:
    out = []
    for i, t in enumerate(args.branch or []):
        out.append(parse_named_branch(t, f"C{i + 1}" if len(args.branch) > 1 else "C"))
    names = [n for n, _ in out]
    if len(set(names)) != len(names):
        raise UsageError("branch names must be distinct")
    return out


def _read_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}")
    except json.JSONDecodeError as e:
        raise ValtreeError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})")


def _points(args) -> List[Tuple[str, S.SKP]]:
    """SKPs from --skp files and --branch curve valuations, in argument order."""
    pts = [(f"skp{i + 1}", S.skp_from_json(_read_json(p))) for i, p in enumerate(args.skp or [])]
    pts += [(n, S.skp_of_branch(C)) for n, C in _branches(args)]
    return pts


def _emit_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _pmap(fn: Callable, items: Sequence, jobs: int) -> list:
    """Ordered map, optionally over a process pool."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------------------
# verbs


def _skp_out(item):
    name, text, as_json = item
    s = S.skp_of_branch(parse_named_branch(text, name)[1])
    return S.skp_to_json(s) if as_json else f"{name}: {S.skp_to_text(s)}"


def cmd_skp(args) -> str:
    names = [n for n, _ in _branches(args)]
    if not names and not args.skp:
        raise UsageError("skp needs --branch or --skp")
    items = [(n, t, args.json) for n, t in zip(names, args.branch or [])]
    outs = _pmap(_skp_out, items, args.jobs)
    for p in args.skp or []:
        s = S.skp_from_json(_read_json(p))
        outs.append(S.skp_to_json(s) if args.json else f"{p}: {S.skp_to_text(s)}")
    if args.json:
        return _emit_json(outs[0] if len(outs) == 1 else outs)
    return "\n".join(outs) + "\n"


def cmd_eval(args) -> str:
    pts = _points(args)
    if len(pts) != 1 or not args.poly:
        raise UsageError("eval needs one point (--branch or --skp) and at least one --poly")
    _, s = pts[0]
    vals = [(p, S.eval_skp(s, parse_poly(p))) for p in args.poly]
    if args.json:
        return _emit_json({"values": [{"poly": p, "value": fmt_q(v)} for p, v in vals]})
    return "".join(f"{fmt_q(v)}\n" for _, v in vals) if len(vals) == 1 else \
        "".join(f"{p}: {fmt_q(v)}\n" for p, v in vals)


def _report(s: S.SKP) -> dict:
    inv = S.invariants(s)
    sg = inv.semigroup
    if inv.kind == "curve":
        # integral semigroup of the branch: values times the multiplicity
        sg = tuple(v * inv.m for v in sg)
    return {
        "kind": inv.kind,
        "monomial": inv.monomial,
        "rank": inv.rk,
        "rational_rank": inv.rat_rk,
        "tr_deg": inv.tr_deg,
        "alpha": fmt_q(inv.alpha),
        "A": fmt_q(inv.A),
        "m": inv.m,
        "b": inv.b,
        "approx": [{"index": a.k, "m": a.m, "alpha": fmt_q(a.alpha), "A": fmt_q(a.A)}
                   for a in inv.approx],
        "semigroup": [fmt_q(v) for v in sg],
    }


def cmd_invariants(args) -> str:
    pts = _points(args)
    if not pts:
        raise UsageError("invariants needs --branch or --skp")
    reps = [(n, _report(s)) for n, s in pts]
    if args.json:
        out = [dict(r, name=n) for n, r in reps]
        return _emit_json(out[0] if len(out) == 1 else out)
    lines = []
    for n, r in reps:
        if len(reps) > 1:
            lines.append(f"{n}:")
        kind = r["kind"] + (" (monomial)" if r["monomial"] else "")
        lines.append(f"kind={kind} alpha={r['alpha']} A={r['A']} m={r['m']}"
                     f" b={'-' if r['b'] is None else r['b']}")
        lines.append("semigroup " + ",".join(r["semigroup"]))
        for a in r["approx"]:
            lines.append(f"approx k={a['index']} m={a['m']} alpha={a['alpha']} A={a['A']}")
    return "\n".join(lines) + "\n"


def cmd_wedge(args) -> str:
    pts = _points(args)
    if len(pts) != 2:
        raise UsageError("wedge needs exactly two points")
    (_, s), (_, t) = pts
    w = S.wedge(s, t)
    rel = S.compare(s, t)
    if args.json:
        return _emit_json({"wedge": S.skp_to_json(w), "alpha": fmt_q(S.skewness(w)),
                           "relation": rel})
    return f"{S.skp_to_text(w)}\nalpha={fmt_q(S.skewness(w))} relation={rel}\n"


def _graph_out(G: DG.DualGraph, args) -> str:
    if args.dot:
        return DG.graph_to_dot(G)
    if args.json:
        return _emit_json(DG.graph_to_json(G))
    return DG.graph_to_text(G)


def cmd_desing(args) -> str:
    br = _branches(args)
    if not br:
        raise UsageError("desing needs at least one --branch")
    G = DG.minimal_desing_from_branches([C for _, C in br], [n for n, _ in br])
    return _graph_out(G, args)


def _equising(args) -> DG.EquisingData:
    if args.equi:
        return DG.equising_from_json(_read_json(args.equi))
    br = _branches(args)
    if not br:
        raise UsageError("needs --equi FILE or --branch")
    return DG.equising_from_branches([C for _, C in br], [n for n, _ in br])


def cmd_desing_equi(args) -> str:
    D = _equising(args)
    if args.emit_equi:
        return _emit_json(DG.equising_to_json(D))
    return _graph_out(DG.minimal_desing_from_equising(D), args)


def cmd_eggers(args) -> str:
    T = DG.eggers_tree(_equising(args))
    if args.json:
        return _emit_json({
            "schema": "eggers.v1",
            "nodes": [{"id": i, "K": fmt_q(T.params[i]), "branches": list(T.members[i]),
                       "marked": T.marked[i], "parent": T.parent[i]}
                      for i in range(len(T.params))]})
    return DG.glued_tree_to_text(T)


def _classical_out(item):
    name, text = item
    C = parse_named_branch(text, name)[1]
    inv = DG.classical_invariants(C)
    return name, {"n": inv.n, "g": inv.g, "beta": list(inv.beta), "e": list(inv.e),
                  "n_i": list(inv.n_i), "semigroup": list(inv.beta_bar)}


def cmd_classical(args) -> str:
    names = [n for n, _ in _branches(args)]
    if not names:
        raise UsageError("classical needs --branch")
    res = _pmap(_classical_out, list(zip(names, args.branch)), args.jobs)
    if args.json:
        out = [dict(d, name=n) for n, d in res]
        return _emit_json(out[0] if len(out) == 1 else out)
    lines = []
    for n, d in res:
        lines.append(f"{n}: n={d['n']} g={d['g']} beta=({','.join(map(str, d['beta']))})"
                     f" e=({','.join(map(str, d['e']))}) n_i=({','.join(map(str, d['n_i']))})"
                     f" semigroup=<{','.join(map(str, d['semigroup']))}>")
    return "\n".join(lines) + "\n"


def _ideals(args) -> List[TM.IdealSpec]:
    if args.ideal_file:
        return [TM.ideal_from_json(_read_json(p)) for p in args.ideal_file] + \
            [TM.parse_ideal(t, dict(_branches(args))) for t in args.ideal or []]
    if not args.ideal:
        raise UsageError("needs --ideal")
    return [TM.parse_ideal(t, dict(_branches(args))) for t in args.ideal]


def cmd_ideal_factor(args) -> str:
    out_json, lines = [], []
    for I in _ideals(args):
        rho, factors = TM.zariski_factor(I)
        if args.json:
            d = TM.measure_to_json(rho)
            d["ideal"] = TM.ideal_to_json(I)
            d["factors"] = [{"valuation": S.skp_to_json(f.valuation), "kind": f.kind,
                             "b": f.b, "n": f.n} for f in factors]
            d["m"] = TM.ideal_multiplicity_order(I)
            out_json.append(d)
        else:
            lines.append(f"ideal ({I.to_text()}) m={TM.ideal_multiplicity_order(I)}")
            lines.append("measure:")
            lines += ["  " + l for l in TM.measure_to_text(rho).splitlines()]
            lines.append("factors:")
            for f in factors:
                lines.append(f"  I_nu^{f.n} b={f.b} {f.kind} nu={S.skp_to_text(f.valuation)}")
    if args.json:
        return _emit_json(out_json[0] if len(out_json) == 1 else out_json)
    return "\n".join(lines) + "\n"


def cmd_closure(args) -> str:
    if not args.phi:
        raise UsageError("closure needs --phi")
    (I,) = _ideals(args)[:1] or (None,)
    names = TM.default_branches(dict(_branches(args)))
    phi = TM.parse_product(args.phi, names)
    extra = {n: names[n] for n, _ in phi}
    ok = TM.integral_closure_member(phi, I, extra)
    if args.json:
        return _emit_json({"phi": args.phi, "ideal": I.to_text(), "member": ok})
    return ("true" if ok else "false") + "\n"


def cmd_mult(args) -> str:
    ideals = _ideals(args)
    if len(ideals) not in (1, 2):
        raise UsageError("mult takes one or two --ideal")
    I, J = ideals[0], ideals[-1]
    e = TM.mixed_multiplicity(I, J)
    if args.json:
        return _emit_json({"ideals": [I.to_text(), J.to_text()], "e": fmt_q(e)})
    return fmt_q(e) + "\n"


def cmd_classmeasure(args) -> str:
    if args.graph:
        G = DG.graph_from_json(_read_json(args.graph))
    else:
        br = _branches(args)
        if not br:
            raise UsageError("classmeasure needs --graph FILE or --branch")
        G = DG.minimal_desing_from_branches([C for _, C in br], [n for n, _ in br])
    rows = []
    for E in range(len(G.vertices)):
        rho = TM.class_measure(G, E)
        w = TM.divisorial_class(G, E)
        nu = DG.vertex_to_skp(G, E)
        rows.append((E, rho, w, nu, -TM.pairing(w, w)))
    if args.json:
        return _emit_json([
            {"vertex": E, "weight": list(G.vertices[E].farey),
             "class_measure": TM.measure_to_json(rho),
             "divisorial_class": {str(i): fmt_q(c) for i, c in w.coords},
             "valuation": S.skp_to_json(nu), "minus_self_pairing": fmt_q(sq)}
            for E, rho, w, nu, sq in rows])
    lines = []
    for E, rho, w, nu, sq in rows:
        a, b = G.vertices[E].farey
        lines.append(f"E{E} ({a},{b}) nu={S.skp_to_text(nu)}")
        lines.append("  rho[E] = " + " + ".join(
            f"({fmt_q(m)})*{S.skp_to_text(s)}" for s, m in rho.atoms))
        lines.append("  omega = " + " + ".join(f"{fmt_q(c)}[E{i}]" for i, c in w.coords)
                     + f"   -omega.omega = {fmt_q(sq)}")
    return "\n".join(lines) + "\n"


def cmd_selftest(args) -> Tuple[str, int]:
    from .acceptance import AcceptanceConfig, run_all, CHECKS

    only = None
    if args.only:
        try:
            only = sorted({int(x) for x in args.only.split(",")})
        except ValueError:
            raise UsageError("--only takes comma-separated criterion numbers")
        if not set(only) <= {i for i, _, _ in CHECKS}:
            raise UsageError("unknown criterion number")
    cfg = AcceptanceConfig(golden_dir=args.golden)
    if args.seed is not None:
        cfg = AcceptanceConfig(seed=args.seed, golden_dir=args.golden)
    res = run_all(cfg, only)
    text = "\n".join(r.line() for r in res) + "\n"
    text += f"{sum(r.ok for r in res)}/{len(res)} criteria passed\n"
    return text, 0 if all(r.ok for r in res) else 1


VERBS = {
    "skp": (cmd_skp, "SKP of a branch, or validate SKP files"),
    "eval": (cmd_eval, "value of polynomials under a valuation"),
    "invariants": (cmd_invariants, "skewness, thinness, multiplicities, semigroup"),
    "wedge": (cmd_wedge, "infimum of two valuations"),
    "desing": (cmd_desing, "minimal desingularization by chart simulation"),
    "desing-equi": (cmd_desing_equi, "minimal desingularization from equisingularity data"),
    "eggers": (cmd_eggers, "Eggers tree"),
    "classical": (cmd_classical, "characteristic exponents and semigroup"),
    "ideal-factor": (cmd_ideal_factor, "tree measure and Zariski factorization of an ideal"),
    "closure": (cmd_closure, "integral closure membership"),
    "mult": (cmd_mult, "(mixed) multiplicity of primary ideals"),
    "classmeasure": (cmd_classmeasure, "measures of exceptional classes"),
    "selftest": (cmd_selftest, "run the acceptance checks"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="valtree", description="Computations in the valuative tree.")
    sub = p.add_subparsers(dest="verb", metavar="VERB")
    sub.required = True
    for verb, (_, help_) in VERBS.items():
        sp = sub.add_parser(verb, help=help_)
        sp.add_argument("--branch", action="append",
                        help='branch "[NAME:] n=2; y=t^3" (repeatable)')
        sp.add_argument("--poly", action="append", help="polynomial in x, y (repeatable)")
        sp.add_argument("--skp", action="append", metavar="FILE", help="skp.v1 JSON file")
        sp.add_argument("--ideal", action="append", help='ideal "x^2, y^3" (repeatable)')
        sp.add_argument("--ideal-file", action="append", metavar="FILE", help="ideal.v1 JSON file")
        sp.add_argument("--phi", help="product of branches, e.g. x*y")
        sp.add_argument("--equi", metavar="FILE", help="equising.v1 JSON file")
        sp.add_argument("--graph", metavar="FILE", help="dualgraph.v1 JSON file")
        sp.add_argument("--emit-equi", action="store_true", help="print equising.v1 data instead")
        sp.add_argument("--json", action="store_true", help="schema-versioned JSON output")
        sp.add_argument("--dot", action="store_true", help="DOT output for graphs")
        sp.add_argument("--trunc", type=int, metavar="N", help="series truncation order")
        sp.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes")
        if verb == "selftest":
            sp.add_argument("--only", help="comma-separated criterion numbers")
            sp.add_argument("--seed", type=int, help="seed for random families")
            sp.add_argument("--golden", metavar="DIR", help="compare CLI outputs to golden files")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.trunc is not None and args.trunc <= 0:
        print("valtree: --trunc must be positive", file=sys.stderr)
        return 2
    if args.jobs < 1:
        print("valtree: --jobs must be positive", file=sys.stderr)
        return 2
    if args.dot and args.verb not in ("desing", "desing-equi"):
        print("valtree: --dot only applies to desing and desing-equi", file=sys.stderr)
        return 2
    fn = VERBS[args.verb][0]
    saved = os.environ.get("VALTREE_TRUNC")
    if args.trunc is not None:
        os.environ["VALTREE_TRUNC"] = str(args.trunc)
    try:
        res = fn(args)
    except UsageError as e:
        print(f"valtree {args.verb}: {e}", file=sys.stderr)
        return 2
    except ValtreeError as e:
        print(f"valtree {args.verb}: error: {e}", file=sys.stderr)
        return 1
    except RecursionError:
        print(f"valtree {args.verb}: error: input too deep", file=sys.stderr)
        return 1
    finally:
        if args.trunc is not None:
            if saved is None:
                os.environ.pop("VALTREE_TRUNC", None)
            else:
                os.environ["VALTREE_TRUNC"] = saved
    code = 0
    if isinstance(res, tuple):
        res, code = res
    sys.stdout.write(res)
    sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
