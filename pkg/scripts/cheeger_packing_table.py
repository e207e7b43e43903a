"""Table of multiway Cheeger constants, Dirichlet Cheeger constants and packing radii."""

import math

from plap import zoo
from plap.geometry import cheeger_hk, dirichlet_Hk, packing_radius

GRAPHS = {"P7": zoo.path(7), "C5": zoo.cycle(5), "C6": zoo.cycle(6), "K4": zoo.complete(4),
          "tripod(2)": zoo.tripod(2), "star": zoo.weighted_star()}


def fmt(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:.4f}"


def main():
    for name, g in GRAPHS.items():
        print(f"{name} (n={g.n}, m={g.m})")
        print(f"  {'k':>2} {'h_k':>8} {'H_k':>8} {'R_k':>8} {'1/R_k':>8}")
        for k in range(1, g.n + 1):
            h = cheeger_hk(g, k)[0]
            H = dirichlet_Hk(g, k)[0] if g.n <= 12 else math.nan
            R = packing_radius(g, k)[0]
            print(f"  {k:>2} {fmt(h):>8} {fmt(H):>8} {fmt(R):>8} {fmt(1 / R):>8}")


if __name__ == "__main__":
    main()
