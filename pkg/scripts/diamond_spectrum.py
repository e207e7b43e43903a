"""Flow-based spectrum of the four-node example graph against its closed-form eigenpairs."""

import argparse

import numpy as np

from plap import zoo
from plap.plap_core import eigen_residual
from plap.solver import FlowConfig, estimate_spectrum


def closed_forms(p: float) -> dict[str, tuple[float, np.ndarray]]:
    q = 1 + (1 + 2 ** 0.5) ** 2 if p == 3 else None
    out = {
        "constant": (0.0, np.ones(4)),
        "(1,0,-1,0)": (2.0, np.array([1.0, 0, -1, 0])),
        "(0,1,0,-1)": (2 + 2 ** (p - 1), np.array([0.0, 1, 0, -1])),
        "(1,-1,1,-1)": (2 ** p, np.array([1.0, -1, 1, -1])),
    }
    if q is not None:
        out["1+(1+sqrt2)^2"] = (q, None)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, nargs="+", default=[2.0, 3.0, 4.0])
    ap.add_argument("--restarts", type=int, default=64)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    g = zoo.diamond()
    for p in args.p:
        est = estimate_spectrum(g, p, FlowConfig(restarts=args.restarts, seed=args.seed))
        print(f"p = {p}: {len(est.critical_values)} critical values")
        for lam, w in zip(est.critical_values, est.witnesses):
            print(f"  {lam:14.10f}  residual {w.residual:.1e}  f = {np.round(w.f, 6)}")
        for name, (lam, f) in closed_forms(p).items():
            hit = any(abs(v - lam) <= 1e-6 * max(1, lam) for v in est.critical_values)
            res = "" if f is None else f"  residual {eigen_residual(g, f, lam, p):.1e}"
            print(f"  closed form {name:>14}: {lam:.10f}  found={hit}{res}")


if __name__ == "__main__":
    main()
