"""Command-line interface: one JSON document on stdout, tables on stderr."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from .abelian import FinAbelian
from .experiments import (
    MetricGroupSpec,
    character_rep,
    icosahedral_rep,
    perm_matrices,
    perturb,
    run_inverse,
    run_stability,
)
from .gowers import (
    MatFunc,
    appendix_suite,
    constant,
    gowers_inner,
    gowers_norm_mc,
    gowers_norm_report,
    random_matfunc,
)
from .groups import abelian_structure, fingerprint, normal_closure, parse_group_spec, quotient
from .pol2 import classify_quad, pol2, pol2_quotient
from .polymaps import PhaseMap, degree_at_most, enumerate_quad_phase
from .verification import dumps_report, verify_paper


def _ints(s: str) -> list[int]:
    return [int(t) for t in s.replace(",", " ").split()] if s else []


def _emit(args, payload, rows: list[dict] | None = None) -> None:
    """Write ``payload`` as JSON, or ``rows`` as CSV, to ``--out`` or stdout."""
    if args.format == "csv":
        rows = rows if rows is not None else (payload if isinstance(payload, list) else [payload])
        buf = io.StringIO()
        keys = sorted({k for r in rows for k in r})
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v for k, v in r.items()})
        text = buf.getvalue()
    elif isinstance(payload, str):
        text = payload
    else:
        text = json.dumps(payload, indent=2, sort_keys=True, default=_default) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _default(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.bool_):
        return bool(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _table(rows: list[tuple]) -> None:
    for r in rows:
        print("  ".join(str(c) for c in r), file=sys.stderr)


# -- group --------------------------------------------------------------------


def cmd_group(args) -> int:
    G = parse_group_spec(args.group)
    if args.action == "make":
        _emit(args, G.to_json())
    elif args.action == "fingerprint":
        fp = fingerprint(G).to_json()
        _table(sorted(fp.items()))
        _emit(args, fp)
    elif args.action == "quotient":
        N = normal_closure(G, _ints(args.normal))
        Q, proj = quotient(G, N)
        _emit(args, {"quotient": Q.to_json(), "projection": [int(x) for x in proj], "kernel_order": N.order})
    return 0


# -- pol2 ---------------------------------------------------------------------


def cmd_pol2(args) -> int:
    G = parse_group_spec(args.group)
    P, uq = pol2(G, max_order=args.max_order or None)
    if args.action == "build":
        out = {"group": args.group, "order": P.order, "module_rank": P.module.rank, "map": [int(x) for x in uq.map]}
        if P.order <= 4096:
            out["fingerprint"] = fingerprint(P.realized).to_json()
        else:
            out["abelian_invariants"] = list(P.abelian_invariants().invariant_factors)
        _emit(args, out)
    else:
        S = _ints(args.generators) or list(range(G.order))
        Q = pol2_quotient(P, uq, S, _ints(args.sigma))
        _emit(args, {"order": Q.order, "fingerprint": fingerprint(Q).to_json()})
    return 0


# -- quad ---------------------------------------------------------------------


def cmd_quad(args) -> int:
    if args.action == "classify":
        A = FinAbelian(tuple(_ints(args.invariants)))
        Q = classify_quad(A)
        _emit(args, {"group": str(A), "quad": Q.to_json()})
        return 0
    G = parse_group_spec(args.group)
    if args.action == "oracle":
        res = enumerate_quad_phase(G, args.modulus)
        out = res.to_json()
        out["classification"] = list(classify_quad(abelian_structure(G)[0]).invariant_factors)
        _emit(args, out)
        return 0
    q = PhaseMap(G, args.modulus, np.array(_ints(args.exponents), dtype=np.int64))
    deg = degree_at_most(q.as_group_map(), args.degree, args.budget)
    _emit(args, {"unital": q.is_unital, "degree_at_most": args.degree, "holds": deg})
    return 0 if deg else 1


# -- gowers -------------------------------------------------------------------


def _matfunc(args, G, rng) -> MatFunc:
    if args.input:
        with open(args.input) as fh:
            return MatFunc.from_json(json.load(fh), G)
    return random_matfunc(G, args.n, rng, args.kind)


def cmd_gowers(args) -> int:
    if args.action == "check":
        res = appendix_suite(args.seed, args.corpus)
        _table([(r.name, "ok" if r.ok else "FAIL", r.measured) for r in res])
        _emit(args, [r.to_json() for r in res])
        return 0 if all(r.ok for r in res) else 1
    G = parse_group_spec(args.group)
    rng = np.random.default_rng(args.seed)
    if args.action == "norm":
        f = _matfunc(args, G, rng)
        out = gowers_norm_report(f, args.k, args.budget).to_json()
        if args.samples:
            est, se = gowers_norm_mc(f, args.k, args.samples, args.seed)
            out["mc"] = {"estimate": est, "stderr": se, "samples": args.samples, "seed": args.seed}
        _emit(args, out)
    else:
        fs = [random_matfunc(G, args.n, rng, args.kind) for _ in range(2**args.k)]
        v = gowers_inner(fs, args.k, args.budget)
        _emit(args, {"k": args.k, "n": args.n, "seed": args.seed, "inner": [v.real, v.imag]})
    return 0


# -- experiments --------------------------------------------------------------


def _rep(name: str, G) -> MatFunc:
    if name == "icosahedral":
        return icosahedral_rep(G)
    if name.startswith("perm"):
        return perm_matrices(G, int(name[4:] or 5))
    if name == "character":
        return character_rep(G)
    if name == "trivial":
        return constant(G, np.eye(1))
    raise ValueError(f"unknown representation {name!r}")


def cmd_stability(args) -> int:
    G = parse_group_spec(args.group)
    rho = perturb(_rep(args.rep, G), args.delta, args.seed)
    rep = run_stability(G, MetricGroupSpec("unitary_hs", rho.dim), rho, args.degree, args.mode, args.seed, args.trials)
    _emit(args, rep.to_json())
    return 0


def cmd_inverse(args) -> int:
    G = parse_group_spec(args.group)
    rep = run_inverse(G, _rep(args.rep, G), args.delta, args.k, args.seed, args.budget)
    _emit(args, rep.to_json())
    return 0


def cmd_verify(args) -> int:
    report = verify_paper(args.seed, args.tamper)
    _table([(e["name"], e["status"]) for e in report])
    if args.format == "csv":
        _emit(args, report)
    else:
        _emit(args, dumps_report(report))
    return 0 if all(e["status"] == "pass" for e in report) else 1


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=None, help="operation budget (overrides POLGOW_BUDGET)")
    common.add_argument("--out", default=None, help="write output here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = argparse.ArgumentParser(prog="polgow", description="Quadratic maps, Pol2 and matrix Gowers norms.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("group", help="build and inspect group tables")
    gs = g.add_subparsers(dest="action", required=True)
    for name in ("make", "fingerprint"):
        q = gs.add_parser(name, parents=[common])
        q.add_argument("group")
    q = gs.add_parser("quotient", parents=[common])
    q.add_argument("group")
    q.add_argument("--normal", required=True, help="generators of the normal subgroup, e.g. '2'")
    g.set_defaults(func=cmd_group)

    g = sub.add_parser("pol2", help="universal quadratic group")
    gs = g.add_subparsers(dest="action", required=True)
    q = gs.add_parser("build", parents=[common])
    q.add_argument("group")
    q.add_argument("--max-order", type=int, default=100_000, help="0 disables the cap")
    q = gs.add_parser("quotient", parents=[common])
    q.add_argument("group")
    q.add_argument("--sigma", required=True, help="generators of the kernel")
    q.add_argument("--generators", default="", help="generating set S of the group (default: all elements)")
    q.add_argument("--max-order", type=int, default=100_000, help="0 disables the cap")
    g.set_defaults(func=cmd_pol2)

    g = sub.add_parser("quad", help="quadratic phases on abelian groups")
    gs = g.add_subparsers(dest="action", required=True)
    q = gs.add_parser("classify", parents=[common])
    q.add_argument("invariants", help="cyclic orders, e.g. '2,4'")
    q = gs.add_parser("oracle", parents=[common])
    q.add_argument("group")
    q.add_argument("--modulus", type=int, default=None)
    q = gs.add_parser("check-map", parents=[common])
    q.add_argument("group")
    q.add_argument("--modulus", type=int, required=True)
    q.add_argument("--exponents", required=True, help="q(x) for each element x, phase exp(2πi q/N)")
    q.add_argument("--degree", type=int, default=2)
    g.set_defaults(func=cmd_quad)

    g = sub.add_parser("gowers", help="matrix-valued Gowers norms")
    gs = g.add_subparsers(dest="action", required=True)
    for name in ("norm", "inner"):
        q = gs.add_parser(name, parents=[common])
        q.add_argument("group")
        q.add_argument("--k", type=int, default=2)
        q.add_argument("--n", type=int, default=1)
        q.add_argument("--kind", choices=("gaussian", "unitary"), default="unitary")
    gs.choices["norm"].add_argument("--input", default=None, help="MatFunc JSON instead of a random function")
    gs.choices["norm"].add_argument("--samples", type=int, default=0, help="also report a Monte Carlo estimate")
    q = gs.add_parser("check", parents=[common])
    q.add_argument("--corpus", type=int, default=200)
    g.set_defaults(func=cmd_gowers)

    g = sub.add_parser("stability", help="uniform defects on perfect groups")
    gs = g.add_subparsers(dest="action", required=True)
    q = gs.add_parser("run", parents=[common])
    q.add_argument("--group", default="A5")
    q.add_argument("--rep", default="icosahedral", help="icosahedral, perm<degree>, character or trivial")
    q.add_argument("--degree", type=int, default=2)
    q.add_argument("--delta", type=float, default=0.0)
    q.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    q.add_argument("--trials", type=int, default=20_000)
    g.set_defaults(func=cmd_stability)

    g = sub.add_parser("inverse", help="perturbed homomorphisms and their U^k norms")
    gs = g.add_subparsers(dest="action", required=True)
    q = gs.add_parser("run", parents=[common])
    q.add_argument("--group", default="A5")
    q.add_argument("--rep", default="icosahedral")
    q.add_argument("--delta", type=float, default=0.05)
    q.add_argument("--k", type=int, default=3)
    g.set_defaults(func=cmd_inverse)

    q = sub.add_parser("verify-paper", parents=[common], help="run every acceptance check")
    q.add_argument("--tamper", action="store_true", help="corrupt the Pol2 cocycle to exercise the failure path")
    q.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    saved = os.environ.get("POLGOW_BUDGET")
    if args.budget is not None:
        os.environ["POLGOW_BUDGET"] = str(args.budget)
    try:
        return args.func(args)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        if saved is None:
            os.environ.pop("POLGOW_BUDGET", None)
        else:
            os.environ["POLGOW_BUDGET"] = saved


if __name__ == "__main__":
    sys.exit(main())
