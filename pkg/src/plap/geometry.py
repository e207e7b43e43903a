"""Exact combinatorial invariants by exhaustive search over node subsets.

Subsets of the ``N`` interior nodes are bitmasks (bit ``i`` is ``g.interior[i]``).
All per-subset quantities are tabulated once over the ``2^N`` masks with numpy, and
min-max problems over families of disjoint subsets are solved by a threshold search
combined with a memoized packing recursion.  Exceeding a node cap raises
:class:`CapExceeded`; nothing here falls back to heuristics.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import networkx as nx
import numpy as np

from .graph_core import Graph

INF = math.inf
CHEEGER_CAP = 16
DIRICHLET_CAP = 12
ST_CAP = 12
PARTITION_CAP = 16

__all__ = [
    "CapExceeded",
    "SubsetFamily",
    "PackingWitness",
    "isoperimetric_c",
    "cheeger_hk",
    "dirichlet_h1",
    "dirichlet_Hk",
    "packing_radius",
    "independence_alpha",
    "maximum_independent_sets",
    "matching_number",
    "st_subpartition_bound",
    "spectral_min_partition",
]


class CapExceeded(RuntimeError):
    """The exact search would exceed its configured node cap."""


@dataclass
class SubsetFamily:
    sets: list[list[str]]
    values: list[float]
    value: float

    def to_json(self) -> dict:
        return {"value": self.value, "sets": self.sets, "values": self.values}


@dataclass
class PackingWitness:
    nodes: list[str]
    min_pair_distance: float
    min_boundary_distance: float
    R: float

    def to_json(self) -> dict:
        return {"nodes": self.nodes, "min_pair_distance": self.min_pair_distance,
                "min_boundary_distance": self.min_boundary_distance, "R": self.R}


def _check_cap(g: Graph, cap: int):
    if g.n > cap:
        raise CapExceeded(f"N = {g.n} exceeds the exact-search cap {cap}")


# ---------------------------------------------------------------------------
# subset tables


class _Tables:
    """Per-mask tables for the interior nodes of one graph."""

    def __init__(self, g: Graph):
        n = g.n
        self.g = g
        self.n = n
        self.masks = np.arange(1 << n, dtype=np.int64)
        self.bits = ((self.masks[:, None] >> np.arange(n)) & 1).astype(bool)
        self.size = self.bits.sum(axis=1)
        ti = g._full_to_interior[g.tails]
        hi = g._full_to_interior[g.heads]
        cut = np.zeros(1 << n)
        nbr = np.zeros(n, dtype=np.int64)
        false = np.zeros(1 << n, dtype=bool)
        for a, b, w in zip(ti, hi, g.w):
            ina = self.bits[:, a] if a >= 0 else false
            inb = self.bits[:, b] if b >= 0 else false
            cut += w * (ina ^ inb)
            if a >= 0 and b >= 0:
                nbr[a] |= 1 << int(b)
                nbr[b] |= 1 << int(a)
        self.cut = cut
        self.mass = self.bits.astype(float) @ g.nu_vec
        with np.errstate(divide="ignore", invalid="ignore"):
            self.c = np.where(self.masks > 0, cut / np.where(self.mass > 0, self.mass, 1.0), INF)
        nb = np.zeros(1 << n, dtype=np.int64)
        for i in range(n):
            nb[self.bits[:, i]] |= nbr[i]
        self.nb = nb
        reach = self.masks & -self.masks
        for _ in range(n):
            reach = (reach | nb[reach]) & self.masks
        self.connected = (reach == self.masks) & (self.masks > 0)

    def names(self, mask: int) -> list[str]:
        return [self.g.interior[i] for i in range(self.n) if mask >> i & 1]

    def mask_of(self, nodes: Iterable) -> int:
        m = 0
        for v in nodes:
            v = str(v)
            if v not in self.g.interior_index:
                raise ValueError(f"{v} is not an interior node")
            m |= 1 << self.g.interior_index[v]
        return m

    def minimal(self, qual: np.ndarray) -> np.ndarray:
        """Inclusion-minimal masks among those flagged in ``qual``."""
        Z = qual.copy()
        for i in range(self.n):
            sel = self.bits[:, i]
            Z[sel] |= Z[self.masks[sel] ^ (1 << i)]
        proper = np.zeros_like(qual)
        for i in range(self.n):
            sel = self.bits[:, i]
            proper[sel] |= Z[self.masks[sel] ^ (1 << i)]
        return qual & ~proper

    def submask_min(self, values: np.ndarray) -> np.ndarray:
        """``out[m] = min over nonempty submasks s of m of values[s]``."""
        out = values.copy()
        out[0] = INF
        for i in range(self.n):
            sel = self.bits[:, i]
            out[sel] = np.minimum(out[sel], out[self.masks[sel] ^ (1 << i)])
        return out


@lru_cache(maxsize=16)
def _tables(g: Graph) -> _Tables:
    return _Tables(g)


def _pack(t: _Tables, sets: np.ndarray, k: int, nonadjacent: bool) -> tuple[int, ...] | None:
    """Up to ``k`` pairwise disjoint (or non-adjacent) masks from ``sets``; None if fewer exist."""
    by_low: dict[int, list[int]] = {}
    for s in sets.tolist():
        by_low.setdefault((s & -s).bit_length() - 1, []).append(s)
    nb = t.nb
    memo: dict[int, tuple[int, ...]] = {}

    def best(U: int) -> tuple[int, ...]:
        if U == 0:
            return ()
        if U in memo:
            return memo[U]
        low = U & -U
        r = best(U & ~low)
        if len(r) < k:
            for S in by_low.get(low.bit_length() - 1, ()):
                if S & ~U:
                    continue
                block = S | int(nb[S]) if nonadjacent else S
                cand = (S,) + best(U & ~block)
                if len(cand) > len(r):
                    r = cand
                    if len(r) >= k:
                        break
        memo[U] = r[:k]
        return memo[U]

    found = best((1 << t.n) - 1)
    return found if len(found) >= k else None


def _minmax_family(t: _Tables, cost: np.ndarray, candidates: np.ndarray, k: int,
                   nonadjacent: bool = False) -> tuple[float, tuple[int, ...]]:
    """``min over k-families of candidate masks of max cost``, with an optimal family."""
    levels = np.unique(cost[candidates & np.isfinite(cost)])
    lo, hi = 0, len(levels) - 1
    answer = None
    while lo <= hi:
        mid = (lo + hi) // 2
        qual = candidates & (cost <= levels[mid])
        fam = _pack(t, t.masks[t.minimal(qual)], k, nonadjacent)
        if fam is not None:
            answer = (float(levels[mid]), fam)
            hi = mid - 1
        else:
            lo = mid + 1
    if answer is None:
        return INF, ()
    return answer


# ---------------------------------------------------------------------------
# Cheeger constants


def isoperimetric_c(g: Graph, A) -> float:
    """``c(A)``: total weight of edges leaving ``A`` (boundary included) over ``nu(A)``."""
    A = {str(v) for v in A}
    if not A:
        raise ValueError("A must be nonempty")
    bad = A - set(g.interior)
    if bad:
        raise ValueError(f"not interior nodes: {sorted(bad)}")
    cut = sum(w for (a, b), w in zip(g.edges, g.omega) if (a in A) != (b in A))
    return cut / sum(g.nu[v] for v in A)


def cheeger_hk(g: Graph, k: int, cap: int = CHEEGER_CAP) -> tuple[float, SubsetFamily]:
    """Exact ``h_k``: min over ``k`` disjoint nonempty subsets of the largest ``c``.

    Only connected subsets are searched; a disconnected set has a component with no
    larger ``c`` (mediant inequality), so the optimum is unchanged.
    """
    if not 1 <= k <= g.n:
        raise ValueError(f"k must lie in 1..{g.n}")
    _check_cap(g, cap)
    t = _tables(g)
    val, fam = _minmax_family(t, t.c, t.connected, k)
    return val, _family(t, fam, t.c)


def _family(t: _Tables, fam, cost) -> SubsetFamily:
    sets = sorted(fam, key=lambda s: (s & -s))
    return SubsetFamily([t.names(s) for s in sets], [float(cost[s]) for s in sets],
                        max((float(cost[s]) for s in sets), default=INF))


def dirichlet_h1(g: Graph, A, cap: int = CHEEGER_CAP) -> float:
    """``h_1(A) = min over nonempty B in A of c(B)``."""
    A = list(A)
    if not A:
        raise ValueError("A must be nonempty")
    if len(A) > cap:
        raise CapExceeded(f"|A| = {len(A)} exceeds the cap {cap}")
    if g.n <= cap:
        t = _tables(g)
        m = t.mask_of(A)
        sub = [s for s in _submasks(m)]
        return float(min(t.c[s] for s in sub))
    return min(isoperimetric_c(g, B) for r in range(1, len(A) + 1) for B in itertools.combinations(A, r))


def _submasks(m: int):
    s = m
    while s:
        yield s
        s = (s - 1) & m


def dirichlet_Hk(g: Graph, k: int, cap: int = DIRICHLET_CAP) -> tuple[float, list[str]]:
    """``H_k = max over |A| >= N-k+1 of h_1(A)`` with a maximizing ``A``.

    ``h_1`` only decreases as ``A`` grows, so sets of size exactly ``N-k+1`` suffice.
    """
    if not 1 <= k <= g.n:
        raise ValueError(f"k must lie in 1..{g.n}")
    _check_cap(g, cap)
    t = _tables(g)
    h1 = t.submask_min(t.c)
    size = g.n - k + 1
    cand = np.flatnonzero(t.size == size)
    best = cand[np.argmax(h1[cand])]
    return float(h1[best]), t.names(int(best))


def _triangles(g: Graph) -> list[tuple[int, int, int]]:
    idx = g.interior_index
    adj = {u: {idx[v] for v, _ in g.neighbors[u] if v in idx} for u in g.interior}
    out = []
    for a, b, c in itertools.combinations(range(g.n), 3):
        A = adj[g.interior[a]]
        if b in A and c in A and c in adj[g.interior[b]]:
            out.append((a, b, c))
    return out


def st_subpartition_bound(g: Graph, k: int, cap: int = ST_CAP) -> tuple[float, dict]:
    """Max over singleton/triangle subpartitions ``P`` with ``l(P) = N-k+1`` of ``h_*(P)``.

    ``h_*(P)`` minimizes ``c`` over nonempty sets meeting every part at most once,
    i.e. the min of ``h_1`` over the singletons plus one chosen vertex per triangle.
    """
    if not 1 <= k <= g.n:
        raise ValueError(f"k must lie in 1..{g.n}")
    _check_cap(g, cap)
    t = _tables(g)
    h1 = t.submask_min(t.c)
    ell = g.n - k + 1
    tris = _triangles(g)
    best, witness = -INF, None
    for nt in range(ell // 2 + 1):
        ns = ell - 2 * nt
        for chosen in itertools.combinations(tris, nt):
            used = [v for tri in chosen for v in tri]
            if len(set(used)) != len(used):
                continue
            rest = [v for v in range(g.n) if v not in used]
            if len(rest) < ns:
                continue
            for singles in itertools.combinations(rest, ns):
                smask = sum(1 << v for v in singles)
                hstar = min(h1[smask | sum(1 << v for v in pick)]
                            for pick in itertools.product(*chosen)) if chosen else h1[smask]
                if hstar > best:
                    best = float(hstar)
                    witness = {"singletons": [g.interior[v] for v in singles],
                               "triangles": [[g.interior[v] for v in tri] for tri in chosen]}
    return best, witness


# ---------------------------------------------------------------------------
# packing and independence


def packing_radius(g: Graph, k: int) -> tuple[float, PackingWitness]:
    """Exact ``R_k``: the largest ``R`` with ``k`` centers pairwise ``>= 2R`` apart and ``>= R`` from ``B``."""
    if not 1 <= k <= g.n:
        raise ValueError(f"k must lie in 1..{g.n}")
    D = g.dist_interior
    dB = g.boundary_dist
    if k == 1:
        i = int(np.argmax(dB))
        return float(dB[i]), PackingWitness([g.interior[i]], INF, float(dB[i]), float(dB[i]))
    cands = np.unique(np.concatenate([D[np.triu_indices(g.n, 1)] / 2, dB]))
    cands = cands[cands > 0]

    def clique(R: float):
        ok = [i for i in range(g.n) if dB[i] >= R * (1 - 1e-12)]
        H = nx.Graph()
        H.add_nodes_from(ok)
        H.add_edges_from((a, b) for a, b in itertools.combinations(ok, 2) if D[a, b] >= 2 * R * (1 - 1e-12))
        nodes, _ = nx.max_weight_clique(H, weight=None)
        return sorted(nodes)

    lo, hi, best = 0, len(cands) - 1, None
    while lo <= hi:
        mid = (lo + hi) // 2
        nodes = clique(cands[mid])
        if len(nodes) >= k:
            best = (float(cands[mid]), nodes[:k])
            lo = mid + 1
        else:
            hi = mid - 1
    if best is None:  # pragma: no cover - k <= N always admits R = min positive distance / 2
        raise RuntimeError("no feasible packing")
    nodes = best[1]
    pair = min(D[a, b] for a, b in itertools.combinations(nodes, 2))
    mb = float(min(dB[i] for i in nodes))
    R = float(min(pair / 2, mb))
    return R, PackingWitness([g.interior[i] for i in nodes], float(pair), mb, R)


def _far_graph(g: Graph, l: float) -> nx.Graph:
    D = g.dist_interior
    H = nx.Graph()
    H.add_nodes_from(range(g.n))
    H.add_edges_from((a, b) for a, b in itertools.combinations(range(g.n), 2)
                     if D[a, b] >= l * (1 - 1e-12))
    return H


def _check_l(g: Graph, l: float):
    # l above the diameter is allowed: every single node is then a maximum set
    if not 0 < l < INF:
        raise ValueError(f"l must be positive and finite, got {l}")


def independence_alpha(g: Graph, l: float) -> tuple[int, list[str]]:
    """Largest set of interior nodes with pairwise distance ``>= l``."""
    _check_l(g, l)
    nodes, _ = nx.max_weight_clique(_far_graph(g, l), weight=None)
    nodes = sorted(nodes)
    return len(nodes), [g.interior[i] for i in nodes]


def maximum_independent_sets(g: Graph, l: float) -> list[list[int]]:
    """All maximum ``l``-independent sets as sorted interior indices, in lexicographic order."""
    _check_l(g, l)
    cliques = [sorted(c) for c in nx.find_cliques(_far_graph(g, l))]
    top = max(len(c) for c in cliques)
    return sorted(c for c in cliques if len(c) == top)


def matching_number(g: Graph) -> tuple[int, list[tuple[str, str]]]:
    """Maximum matching over all edges of the graph."""
    H = nx.Graph()
    H.add_nodes_from(g.node_ids)
    H.add_edges_from(g.edges)
    M = nx.max_weight_matching(H, maxcardinality=True)
    pairs = sorted((tuple(sorted(e, key=g.index.__getitem__)) for e in M), key=lambda e: g.index[e[0]])
    return len(pairs), pairs


# ---------------------------------------------------------------------------
# spectral minimal partitions for the inf-Laplacian


def _complement_distance(t: _Tables) -> np.ndarray:
    """``dc[m, u] = d(u, V minus m)`` for interior ``u`` in ``m`` (over all of ``V``, boundary included)."""
    g = t.g
    full_of = g._full_to_interior
    out = np.full((1 << t.n, t.n), INF)
    for u in range(t.n):
        row = g.dist[g.index[g.interior[u]]]
        done = np.zeros(1 << t.n, dtype=bool)
        for w in np.argsort(row, kind="stable"):
            if not np.isfinite(row[w]):
                break
            j = full_of[w]
            outside = ~done & (np.ones(1 << t.n, dtype=bool) if j < 0 else ~t.bits[:, j])
            out[outside, u] = row[w]
            done |= outside
            if done.all():
                break
    return out


def _partition_cost(t: _Tables, order: int) -> np.ndarray:
    dc = _complement_distance(t)
    if order == 1:
        inr = np.where(t.bits, dc, -INF).max(axis=1)
        with np.errstate(divide="ignore"):
            cost = np.where(t.masks > 0, 1.0 / inr, INF)
        return cost
    D = t.g.dist_interior
    R2 = np.full(1 << t.n, -INF)
    for a, b in itertools.combinations(range(t.n), 2):
        both = t.bits[:, a] & t.bits[:, b]
        val = np.minimum(np.minimum(D[a, b] / 2, dc[:, a]), dc[:, b])
        R2 = np.where(both, np.maximum(R2, val), R2)
    with np.errstate(divide="ignore"):
        return np.where(t.size >= 2, 1.0 / R2, INF)


def spectral_min_partition(g: Graph, k: int, mode: str = "disjoint", order: int = 1,
                           cap: int = PARTITION_CAP) -> tuple[float, SubsetFamily]:
    """Min over ``k`` disjoint (or pairwise non-adjacent) subsets of the largest Dirichlet inf-eigenvalue.

    ``order=1`` uses ``Lambda_1(V_i) = 1/inradius`` and ``order=2`` uses
    ``Lambda_2(V_i) = 1/R_2`` with ``V minus V_i`` acting as boundary.
    """
    if mode not in ("disjoint", "nonadjacent"):
        raise ValueError("mode must be 'disjoint' or 'nonadjacent'")
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if not 1 <= k <= g.n:
        raise ValueError(f"k must lie in 1..{g.n}")
    _check_cap(g, cap)
    t = _tables(g)
    cost = _partition_cost(t, order)
    val, fam = _minmax_family(t, cost, t.masks > 0, k, nonadjacent=(mode == "nonadjacent"))
    return val, _family(t, fam, cost)
