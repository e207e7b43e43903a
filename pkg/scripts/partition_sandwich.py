"""Check that spectral minimal partition values sit between the packing-radius bounds on random graphs."""

import argparse

import numpy as np

from plap import zoo
from plap.geometry import packing_radius, spectral_min_partition


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--graphs", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    viol = checked = 0
    for s in range(args.graphs):
        rng = np.random.default_rng([args.seed, s])
        g = zoo.random_graph(rng, int(rng.integers(4, 9)), boundary=int(rng.integers(0, 2)))
        half = 1 / (2 * min(g.omega))
        for k in range(2, min(g.n, 4) + 1):
            R = packing_radius(g, k)[0]
            a = 1 / spectral_min_partition(g, k, "disjoint", 1)[0]
            b = 1 / spectral_min_partition(g, k, "nonadjacent", 1)[0]
            ok = R - 1e-9 <= a <= R + half + 1e-9 and R - half - 1e-9 <= b <= R + 1e-9
            checked += 1
            viol += not ok
            flag = "" if ok else "  VIOLATION"
            print(f"graph {s:3d} k={k}: R={R:.4f} disjoint={a:.4f} nonadjacent={b:.4f}{flag}")
    print(f"{checked} checks, {viol} violations")


if __name__ == "__main__":
    main()
