"""Nodal domains: strong, weak and perfect counts, boundary ratios and support components."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph_core import Graph, connected_components, incidence_apply
from .plap_core import rayleigh_p

ZERO_RTOL = 1e-12

__all__ = [
    "NodalReport",
    "nodal_domains",
    "strong_domains",
    "nodal_boundary_ratio",
    "classify_support_components",
    "perturbation_radius",
]


@dataclass
class NodalReport:
    strong_domains: list[tuple[int, list[str]]]
    weak_domains: list[tuple[int, list[str]]]
    perfect_domains: list[tuple[int, list[str]]]
    zero_set: list[str]

    @property
    def SN(self) -> int:
        return len(self.strong_domains)

    @property
    def WN(self) -> int:
        return len(self.weak_domains)

    @property
    def PN(self) -> int:
        return len(self.perfect_domains)

    def to_json(self) -> dict:
        def dump(doms):
            return [{"sign": s, "nodes": nodes} for s, nodes in doms]

        return {
            "SN": self.SN, "WN": self.WN, "PN": self.PN,
            "strong_domains": dump(self.strong_domains),
            "weak_domains": dump(self.weak_domains),
            "perfect_domains": dump(self.perfect_domains),
            "zero_set": self.zero_set,
        }


def _signs(f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    M = float(np.max(np.abs(f)))
    if M == 0:
        raise ValueError("f must be nonzero")
    s = np.sign(f)
    s[np.abs(f) <= ZERO_RTOL * M] = 0
    return s


def strong_domains(g: Graph, f) -> tuple[list[list[str]], list[list[str]]]:
    """Positive and negative strong nodal domains, each list in node order."""
    s = _signs(f)
    pos = connected_components(g, [v for v, x in zip(g.interior, s) if x > 0])
    neg = connected_components(g, [v for v, x in zip(g.interior, s) if x < 0])
    return pos, neg


def nodal_domains(g: Graph, f) -> NodalReport:
    f = np.asarray(f, dtype=float)
    s = _signs(f)
    pos, neg = strong_domains(g, f)
    strong = [(1, A) for A in pos] + [(-1, A) for A in neg]
    strong.sort(key=lambda d: g.index[d[1][0]])
    sign_of = dict(zip(g.interior, s))
    weak = []
    for sgn in (1, -1):
        for C in connected_components(g, [v for v, x in zip(g.interior, s) if x * sgn >= 0]):
            if any(sign_of[v] == sgn for v in C):
                weak.append((sgn, C))
    weak.sort(key=lambda d: (g.index[d[1][0]], -d[0]))
    M = float(np.max(np.abs(f)))
    peak = {v for v, x in zip(g.interior, f) if abs(x) >= (1 - ZERO_RTOL) * M}
    perfect = [(sgn, A) for sgn, A in strong if peak.intersection(A)]
    zero = [v for v, x in zip(g.interior, s) if x == 0]
    return NodalReport(strong, weak, perfect, zero)


def nodal_boundary_ratio(g: Graph, f, A, p: float) -> float:
    """``sum_{E(A, A^c)} omega |Kf|^{p-1} / sum_A nu |f|^{p-1}`` for a strong nodal domain ``A``.

    Cut edges to boundary nodes are included.  For an eigenpair the value is ``lambda``.
    """
    if not p > 1:
        raise ValueError("p must exceed 1")
    A = sorted({str(v) for v in A}, key=g.index.__getitem__)
    pos, neg = strong_domains(g, f)
    if A not in pos and A not in neg:
        raise ValueError("A is not a strong nodal domain of f")
    f = np.asarray(f, dtype=float)
    inA = set(A)
    Kf = incidence_apply(g, f)
    cut = sum(w * abs(k) ** (p - 1) for (a, b), w, k in zip(g.edges, g.omega, Kf)
              if (a in inA) != (b in inA))
    idx = [g.interior_index[v] for v in A]
    mass = float(np.sum(g.nu_vec[idx] * np.abs(f[idx]) ** (p - 1)))
    return float(cut / mass)


def classify_support_components(g: Graph, f, tol: float = 1e-12) -> dict[str, list[list[str]]]:
    """Tag each component ``U`` of ``supp f`` by comparing ``R_inf(f|_U)`` with ``R_inf(f)``."""
    s = _signs(f)
    f = np.asarray(f, dtype=float)
    R = rayleigh_p(g, f, math.inf)
    out = {"equal": [], "super": [], "sub": []}
    for U in connected_components(g, [v for v, x in zip(g.interior, s) if x != 0]):
        fu = g.indicator(U) * f
        RU = rayleigh_p(g, fu, math.inf)
        if abs(RU - R) <= tol * max(1.0, R):
            out["equal"].append(U)
        elif RU > R:
            out["super"].append(U)
        else:
            out["sub"].append(U)
    return out


def perturbation_radius(f) -> float:
    """Half the smaller of ``min |f|`` over the support and the gap below the sup level.

    Perturbations within this sup-distance cannot create perfect domains or split weak ones.
    """
    a = np.abs(np.asarray(f, dtype=float))
    M = float(a.max())
    if M == 0:
        raise ValueError("f must be nonzero")
    nz = a[a > ZERO_RTOL * M]
    below = nz[nz < (1 - ZERO_RTOL) * M]
    gap = M - float(below.max()) if below.size else M
    return 0.5 * min(float(nz.min()), gap)
