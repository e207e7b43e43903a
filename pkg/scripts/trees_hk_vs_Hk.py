"""Experiment on the open question whether h_k equals H_k on every tree.

Random weighted trees are generated and both constants are computed exactly for every k.
Any gap larger than the tolerance is printed as a counterexample candidate.
"""

import argparse

import numpy as np

from plap.geometry import cheeger_hk, dirichlet_Hk
from plap.graph_core import Graph


def random_tree(rng: np.random.Generator, n: int, weighted: bool) -> Graph:
    edges = []
    for i in range(1, n):
        j = int(rng.integers(0, i))
        w = float(rng.uniform(0.5, 2.0)) if weighted else 1.0
        edges.append((str(j + 1), str(i + 1), w))
    nu = {str(i + 1): float(rng.uniform(0.5, 2.0)) for i in range(n)} if weighted else None
    return Graph.from_edges(edges, nu=nu)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trees", type=int, default=60)
    ap.add_argument("--n-max", type=int, default=9)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--unweighted", action="store_true")
    args = ap.parse_args()
    gaps = 0
    for s in range(args.trees):
        rng = np.random.default_rng([args.seed, s])
        g = random_tree(rng, int(rng.integers(3, args.n_max + 1)), not args.unweighted)
        for k in range(1, g.n + 1):
            h, H = cheeger_hk(g, k)[0], dirichlet_Hk(g, k)[0]
            if abs(h - H) > 1e-10 * max(1.0, h):
                gaps += 1
                print(f"tree {s} (n={g.n}) k={k}: h_k={h:.6f} H_k={H:.6f} edges={g.edges}")
    print(f"{args.trees} trees, {gaps} (tree, k) pairs with h_k != H_k")


if __name__ == "__main__":
    main()
