"""Command-line front end.  Every subcommand prints one JSON report on stdout.

Exit codes: 0 success, 1 verification failed, 2 bad input, 3 no convergence,
4 exact-search cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from importlib import metadata

import numpy as np

from . import degenerate, duality, geometry, nodal, plap_core, solver
from .graph_core import Graph, GraphFormatError, load_graph, load_node_fn

SCHEMA = "report.v1"
EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CONVERGENCE, EXIT_CAP = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# JSON helpers


def jsonable(x):
    """Convert numpy values and non-finite floats into strict-JSON friendly objects."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:  # pragma: no cover
        return "unknown"


def _parse_p(text: str) -> float:
    try:
        return plap_core.parse_p(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _seed(args) -> int:
    if getattr(args, "seed", None) is None:
        args.seed = int(np.random.SeedSequence().entropy % (2 ** 32))
    return args.seed


def _graph(args) -> Graph:
    try:
        return load_graph(args.graph)
    except FileNotFoundError:
        raise InputError(f"graph file not found: {args.graph}") from None


def _fn(g: Graph, args) -> np.ndarray:
    try:
        return load_node_fn(g, args.f)
    except FileNotFoundError:
        raise InputError(f"function file not found: {args.f}") from None


def _lambda(args, p: float) -> tuple[float, float]:
    """``(lambda, Lambda)`` from whichever flag was given."""
    if args.Lambda is not None:
        L = args.Lambda
        lam = L if p == 1 or math.isinf(p) else L ** p
    elif args.lam is not None:
        lam = args.lam
        L = lam if p == 1 or math.isinf(p) else max(lam, 0.0) ** (1 / p)
    else:
        raise InputError("give --lambda or --Lambda")
    return lam, L


# ---------------------------------------------------------------------------
# subcommands


def cmd_spectrum(args):
    g = _graph(args)
    p = args.p
    if p == 1:
        return _spectrum_one(g, args), EXIT_OK
    if math.isinf(p):
        return _spectrum_inf(g), EXIT_OK
    cfg = solver.FlowConfig(tol=args.flow_tol, restarts=args.restarts, seed=_seed(args), threads=args.threads)
    est = solver.estimate_spectrum(g, p, cfg)
    out = {"p": p, "mode": "flow", **est.to_json(g), "note": "heuristic under-approximation of the spectrum"}
    if p == 2:
        out["linear_eigenvalues"] = solver.linear_pairs(g)[0]
    return out, EXIT_OK


def _spectrum_inf(g: Graph) -> dict:
    """Certified cone and cone-difference eigenpairs for every admissible center choice."""
    import itertools

    found: dict[float, dict] = {}
    cands = [(u,) for u in g.interior] if g.boundary else []
    cands += list(itertools.combinations(g.interior, 2))
    for c in cands:
        try:
            e = degenerate.cone_eigenfunction(g, c)
        except ValueError:
            continue
        key = round(e.lam, 12)
        if key in found or not degenerate.verify_inf_eigenpair(g, e.f, e.lam):
            continue
        found[key] = {"Lambda": e.lam, "centers": list(c), "f": g.as_dict(e.f)}
    if not g.boundary and g.is_connected():
        found.setdefault(0.0, {"Lambda": 0.0, "centers": [], "f": g.as_dict(np.ones(g.n))})
    vals = sorted(found)
    return {"p": "inf", "mode": "constructed cones (certified)", "critical_values": [found[v]["Lambda"] for v in vals],
            "witnesses": [found[v] for v in vals]}


def _spectrum_one(g: Graph, args) -> dict:
    """Certified indicator eigenpairs of connected subsets, a few tries per isoperimetric value."""
    geometry._check_cap(g, geometry.CHEEGER_CAP)
    t = geometry._tables(g)
    by_val: dict[float, list[int]] = {}
    for m in np.flatnonzero(t.connected):
        by_val.setdefault(round(float(t.c[m]), 12), []).append(int(m))
    out = []
    for v in sorted(by_val):
        for m in sorted(by_val[v], key=lambda m: (int(t.size[m]), m))[:3]:
            f = g.indicator(t.names(m))
            cert = degenerate.verify_1_eigenpair(g, f, float(t.c[m]))
            if cert:
                out.append({"Lambda": float(t.c[m]), "set": t.names(m), "certificate": cert.to_json(g)})
                break
    return {"p": 1, "mode": "connected indicators (certified)",
            "critical_values": [w["Lambda"] for w in out], "witnesses": out}


def cmd_verify(args):
    g = _graph(args)
    f = _fn(g, args)
    p = args.p
    lam, L = _lambda(args, p)
    if p == 1:
        cert = degenerate.verify_1_eigenpair(g, f, L, args.tol)
        return {"p": 1, "Lambda": L, "pass": cert.feasible, "reason": cert.reason,
                "certificate": cert.to_json(g)}, EXIT_OK if cert else EXIT_FAIL
    if math.isinf(p):
        cert = degenerate.verify_inf_eigenpair(g, f, L, args.tol)
        sp = degenerate.sp_witness(g, f)
        visc = degenerate.verify_viscosity(g, f, L)
        return {"p": "inf", "Lambda": L, "pass": cert.feasible, "reason": cert.reason,
                "certificate": cert.to_json(g), "sp_witness": sp.to_json() if sp else None,
                "viscosity": visc.to_json()}, EXIT_OK if cert else EXIT_FAIL
    R = plap_core.rayleigh_p(g, f, p)
    res = plap_core.eigen_residual(g, f, lam, p)
    ok = res <= args.tol
    reason = "" if ok else "residual"
    if abs(R ** p - lam) > 1e-10 * max(1.0, R ** p):
        ok, reason = False, "rayleigh-mismatch"
    return {"p": p, "lambda": lam, "Lambda": L, "rayleigh_p": R, "residual": res, "pass": ok,
            "reason": reason}, EXIT_OK if ok else EXIT_FAIL


def cmd_geometry(args):
    g = _graph(args)
    q = args.quantity
    need_k = {"cheeger", "dirichlet", "packing", "st"}
    if q in need_k and args.k is None:
        raise InputError(f"--k is required for {q}")
    if q == "cheeger":
        val, fam = geometry.cheeger_hk(g, args.k)
        res = {"h_k": val, "family": fam.to_json()}
    elif q == "dirichlet":
        val, A = geometry.dirichlet_Hk(g, args.k)
        res = {"H_k": val, "set": A}
    elif q == "packing":
        val, w = geometry.packing_radius(g, args.k)
        res = {"R_k": val, "witness": w.to_json()}
    elif q == "independence":
        if args.l is None:
            raise InputError("--l is required for independence")
        a, S = geometry.independence_alpha(g, args.l)
        res = {"alpha_l": a, "set": S}
    elif q == "matching":
        b, M = geometry.matching_number(g)
        res = {"beta": b, "matching": [list(e) for e in M]}
    elif q == "st":
        val, P = geometry.st_subpartition_bound(g, args.k)
        res = {"bound": val, "subpartition": P}
    elif q == "isoperimetric":
        if not args.set:
            raise InputError("--set is required for isoperimetric")
        A = args.set.split(",")
        res = {"c": geometry.isoperimetric_c(g, A), "dirichlet_h1": geometry.dirichlet_h1(g, A)}
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(q)
    return {"quantity": q, "k": args.k, **res}, EXIT_OK


def cmd_nodal(args):
    g = _graph(args)
    f = _fn(g, args)
    rep = nodal.nodal_domains(g, f)
    out = {**rep.to_json(), "support_components": nodal.classify_support_components(g, f),
           "perturbation_radius": nodal.perturbation_radius(f)}
    if args.p is not None and 1 < args.p < math.inf:
        out["boundary_ratios"] = [{"nodes": A, "ratio": nodal.nodal_boundary_ratio(g, f, A, args.p)}
                                  for _, A in rep.strong_domains]
    return out, EXIT_OK


def cmd_dual(args):
    g = _graph(args)
    d1, d2 = duality.kernel_dims(g)
    out = {"kernel_dims": {"d1": d1, "d2": d2}}
    if args.f is None:
        return out, EXIT_OK
    f = _fn(g, args)
    p = args.p
    if p is None:
        raise InputError("--p is required with --f")
    lam, L = _lambda(args, p)
    if p == 1 or math.isinf(p):
        d = duality.degenerate_dual(g, f, L, p)
        out["dual"] = d.to_json(g)
        return out, EXIT_OK if d else EXIT_FAIL
    try:
        e = duality.node_to_edge_dual(g, plap_core.Eigenpair(f, lam, p), tol=args.tol)
    except ValueError as exc:
        out["dual"] = {"feasible": False, "reason": str(exc)}
        return out, EXIT_FAIL
    out["dual"] = e.to_json(g)
    return out, EXIT_OK


def cmd_scan(args):
    g = _graph(args)
    try:
        grid = [float(x) for x in args.p_grid.split(",")]
    except ValueError:
        raise InputError(f"bad --p-grid {args.p_grid!r}") from None
    cfg = solver.FlowConfig(seed=_seed(args), threads=args.threads)
    rows = solver.p_scan(g, grid, args.k, cfg)
    width = max(len(r.values) for r in rows)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["p"] + [f"lambda_{i + 1}" for i in range(width)])
            for r in rows:
                w.writerow([r.p] + [repr(v) for v in r.values] + [""] * (width - len(r.values)))
    table = [{"p": r.p, "tracked_lambda": r.tracked, "edge_normalized": r.edge_normalized,
              "measure_normalized": r.measure_normalized, "values": r.values} for r in rows]
    return {"k": args.k, "rows": table, "csv": args.csv}, EXIT_OK


def cmd_partition(args):
    g = _graph(args)
    val, fam = geometry.spectral_min_partition(g, args.k, args.mode, args.order)
    return {"k": args.k, "mode": args.mode, "order": args.order, "Lambda": val,
            "inverse": (1.0 / val) if val > 0 else math.inf, "family": fam.to_json()}, EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plap", description="Graph p-Laplacian spectral toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--graph", required=True, help="GRAPH v1 file")
        sp.set_defaults(func=fn)
        return sp

    def lam_flags(sp):
        sp.add_argument("--lambda", dest="lam", type=float, help="unnormalized eigenvalue lambda")
        sp.add_argument("--Lambda", dest="Lambda", type=float, help="normalized eigenvalue Lambda")

    sp = add("spectrum", cmd_spectrum, "eigenvalue estimates (p>1) or certified constructions (p=1, inf)")
    sp.add_argument("--p", type=_parse_p, required=True)
    sp.add_argument("--restarts", type=int, default=64)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--flow-tol", type=float, default=1e-10)

    sp = add("verify", cmd_verify, "certify a candidate eigenpair")
    sp.add_argument("--f", required=True, help="NodeFn JSON file or inline JSON object")
    sp.add_argument("--p", type=_parse_p, required=True)
    lam_flags(sp)
    sp.add_argument("--tol", type=float, default=1e-8)

    sp = add("geometry", cmd_geometry, "exact combinatorial invariants")
    sp.add_argument("--quantity", required=True,
                    choices=["cheeger", "dirichlet", "packing", "independence", "matching", "st", "isoperimetric"])
    sp.add_argument("--k", type=int)
    sp.add_argument("--l", type=float)
    sp.add_argument("--set", help="comma-separated node ids")

    sp = add("nodal", cmd_nodal, "nodal domain report")
    sp.add_argument("--f", required=True)
    sp.add_argument("--p", type=_parse_p)

    sp = add("dual", cmd_dual, "kernel dimensions and the node-to-edge dual pair")
    sp.add_argument("--f")
    sp.add_argument("--p", type=_parse_p)
    lam_flags(sp)
    sp.add_argument("--tol", type=float, default=1e-8)

    sp = add("scan", cmd_scan, "continuation in p with normalized eigenvalue sequences")
    sp.add_argument("--p-grid", required=True, help="comma-separated increasing p values")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--csv", help="write p,lambda_1,... rows here")

    sp = add("partition", cmd_partition, "spectral minimal k-partition for the inf-Laplacian")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--mode", choices=["disjoint", "nonadjacent"], default="disjoint")
    sp.add_argument("--order", type=int, choices=[1, 2], default=1)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    t0 = time.perf_counter()
    try:
        results, code = args.func(args)
    except (GraphFormatError, InputError) as exc:
        print(f"plap: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except solver.NonConvergence as exc:
        print(f"plap: no convergence: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except geometry.CapExceeded as exc:
        print(f"plap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ValueError as exc:
        print(f"plap: invalid request: {exc}", file=sys.stderr)
        return EXIT_INPUT
    inputs = {k: v for k, v in vars(args).items() if k not in ("func", "command")}
    report = {
        "schema": SCHEMA,
        "command": args.command,
        "argv": list(argv) if argv is not None else sys.argv[1:],
        "inputs": inputs,
        "results": results,
        "provenance": {"package": "plap", "version": _version(), "numpy": np.__version__,
                       "seed": inputs.get("seed")},
        "timings": {"wall_seconds": time.perf_counter() - t0},
    }
    json.dump(jsonable(report), sys.stdout, indent=2, allow_nan=False)
    sys.stdout.write("\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
