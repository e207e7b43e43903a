"""Weighted graphs with a Dirichlet boundary, the incidence operator and file I/O.

Node functions are numpy vectors indexed by the interior nodes in load order
(``Graph.interior``); boundary values are implicitly zero.  Edge functions are
vectors indexed by the stored edges, each carrying its canonical orientation
``(u, v)``.  The value on the reversed orientation is the negative, so
antisymmetry holds by construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc
from scipy.sparse.csgraph import shortest_path

__all__ = [
    "Graph",
    "GraphFormatError",
    "load_graph",
    "dump_graph",
    "parse_graph",
    "distance",
    "boundary_distance",
    "incidence_apply",
    "divergence_apply",
    "connected_components",
    "load_node_fn",
    "dump_node_fn",
]


class GraphFormatError(ValueError):
    """Raised for malformed graph or node-function input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected weighted graph ``(V, E, omega)`` with boundary ``B`` and node measure ``nu``.

    ``edges[i] = (u, v)`` is stored with ``u`` before ``v`` in node order and
    ``omega[i]`` is its weight, the reciprocal of the edge length.
    """

    node_ids: tuple[str, ...]
    boundary: frozenset[str]
    edges: tuple[tuple[str, str], ...]
    omega: tuple[float, ...]
    nu: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        ids = tuple(str(v) for v in self.node_ids)
        if len(set(ids)) != len(ids):
            raise GraphFormatError("duplicate node id")
        object.__setattr__(self, "node_ids", ids)
        pos = {v: i for i, v in enumerate(ids)}
        bnd = frozenset(str(b) for b in self.boundary)
        if not bnd <= set(ids):
            raise GraphFormatError("boundary node referenced but undeclared")
        object.__setattr__(self, "boundary", bnd)
        if len(self.edges) != len(self.omega):
            raise GraphFormatError("edges and omega differ in length")
        seen: set[tuple[str, str]] = set()
        canon, weights = [], []
        for (a, b), w in zip(self.edges, self.omega):
            a, b = str(a), str(b)
            if a not in pos or b not in pos:
                raise GraphFormatError(f"edge ({a},{b}) uses an unknown node")
            if a == b:
                raise GraphFormatError(f"self-loop at {a}")
            if pos[a] > pos[b]:
                a, b = b, a
            if (a, b) in seen:
                raise GraphFormatError(f"duplicate edge ({a},{b})")
            w = float(w)
            if not (w > 0 and math.isfinite(w)):
                raise GraphFormatError(f"nonpositive omega on edge ({a},{b})")
            seen.add((a, b))
            canon.append((a, b))
            weights.append(w)
        object.__setattr__(self, "edges", tuple(canon))
        object.__setattr__(self, "omega", tuple(weights))
        interior = [v for v in ids if v not in bnd]
        if not interior:
            raise GraphFormatError("graph has no interior nodes")
        nu = {}
        for v in interior:
            m = float(self.nu.get(v, 1.0))
            if not (m > 0 and math.isfinite(m)):
                raise GraphFormatError(f"nonpositive nu at node {v}")
            nu[v] = m
        object.__setattr__(self, "nu", nu)

    # ------------------------------------------------------------------ builders
    @classmethod
    def from_edges(
        cls,
        edges: Iterable[Sequence],
        *,
        nodes: Iterable | None = None,
        boundary: Iterable = (),
        nu: Mapping | None = None,
    ) -> "Graph":
        """Build from ``(u, v)`` or ``(u, v, omega)`` tuples; ids are stringified."""
        elist = [tuple(e) for e in edges]
        order: list[str] = [str(v) for v in nodes] if nodes is not None else []
        known = set(order)
        for e in elist:
            for v in e[:2]:
                if str(v) not in known:
                    known.add(str(v))
                    order.append(str(v))
        for b in boundary:
            if str(b) not in known:
                known.add(str(b))
                order.append(str(b))
        pairs = [(str(e[0]), str(e[1])) for e in elist]
        weights = [float(e[2]) if len(e) > 2 else 1.0 for e in elist]
        return cls(
            tuple(order),
            frozenset(str(b) for b in boundary),
            tuple(pairs),
            tuple(weights),
            {str(k): float(v) for k, v in (nu or {}).items()},
        )

    def with_boundary(self, boundary: Iterable) -> "Graph":
        bnd = frozenset(str(b) for b in boundary)
        return Graph(self.node_ids, bnd, self.edges, self.omega,
                     {k: v for k, v in self.nu.items() if k not in bnd})

    def with_weights(self, omega: Sequence[float] | None = None, nu: Mapping | None = None) -> "Graph":
        return Graph(self.node_ids, self.boundary, self.edges,
                     tuple(omega) if omega is not None else self.omega,
                     dict(nu) if nu is not None else dict(self.nu))

    # ------------------------------------------------------------------ indexing
    @cached_property
    def interior(self) -> tuple[str, ...]:
        return tuple(v for v in self.node_ids if v not in self.boundary)

    @property
    def n(self) -> int:
        """Number of interior nodes N."""
        return len(self.interior)

    @property
    def m(self) -> int:
        """Number of undirected edges."""
        return len(self.edges)

    @cached_property
    def index(self) -> dict[str, int]:
        """Position of every node in ``node_ids``."""
        return {v: i for i, v in enumerate(self.node_ids)}

    @cached_property
    def interior_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.interior)}

    @cached_property
    def _interior_mask(self) -> np.ndarray:
        return np.array([v not in self.boundary for v in self.node_ids])

    @cached_property
    def _full_to_interior(self) -> np.ndarray:
        out = np.full(len(self.node_ids), -1, dtype=np.int64)
        out[self._interior_mask] = np.arange(self.n)
        return out

    @cached_property
    def tails(self) -> np.ndarray:
        """Full-node index of the first endpoint of each stored edge."""
        return np.array([self.index[a] for a, _ in self.edges], dtype=np.int64)

    @cached_property
    def heads(self) -> np.ndarray:
        return np.array([self.index[b] for _, b in self.edges], dtype=np.int64)

    @cached_property
    def w(self) -> np.ndarray:
        return np.asarray(self.omega, dtype=float)

    @cached_property
    def nu_vec(self) -> np.ndarray:
        return np.array([self.nu[v] for v in self.interior], dtype=float)

    @cached_property
    def edge_index(self) -> dict[tuple[str, str], int]:
        return {e: i for i, e in enumerate(self.edges)}

    def edge_of(self, u: str, v: str) -> tuple[int, int]:
        """Index of edge ``{u, v}`` and the orientation sign of ``(u, v)``."""
        u, v = str(u), str(v)
        if (u, v) in self.edge_index:
            return self.edge_index[(u, v)], 1
        if (v, u) in self.edge_index:
            return self.edge_index[(v, u)], -1
        raise KeyError(f"no edge between {u} and {v}")

    @cached_property
    def neighbors(self) -> dict[str, list[tuple[str, float]]]:
        nb: dict[str, list[tuple[str, float]]] = {v: [] for v in self.node_ids}
        for (a, b), w in zip(self.edges, self.omega):
            nb[a].append((b, w))
            nb[b].append((a, w))
        return nb

    @property
    def is_unweighted(self) -> bool:
        return all(w == 1.0 for w in self.omega) and all(m == 1.0 for m in self.nu.values())

    # ------------------------------------------------------------ conversions
    def extend(self, f) -> np.ndarray:
        """Extend an interior vector by zero to all of ``V``."""
        f = np.asarray(f, dtype=float)
        if f.shape != (self.n,):
            raise ValueError(f"node function must have length {self.n}, got {f.shape}")
        out = np.zeros(len(self.node_ids))
        out[self._interior_mask] = f
        return out

    def node_fn(self, values: Mapping | Sequence | np.ndarray) -> np.ndarray:
        """Interior vector from a mapping id -> value or from an ordered sequence."""
        if isinstance(values, Mapping):
            vals = {str(k): float(v) for k, v in values.items()}
            missing = [v for v in self.interior if v not in vals]
            if missing:
                raise GraphFormatError(f"missing values for interior nodes {missing}")
            extra = [k for k in vals if k not in self.index]
            if extra:
                raise GraphFormatError(f"unknown node ids {extra}")
            return np.array([vals[v] for v in self.interior])
        arr = np.asarray(values, dtype=float)
        if arr.shape != (self.n,):
            raise ValueError(f"node function must have length {self.n}")
        return arr.copy()

    def indicator(self, nodes: Iterable) -> np.ndarray:
        f = np.zeros(self.n)
        for v in nodes:
            f[self.interior_index[str(v)]] = 1.0
        return f

    def as_dict(self, f) -> dict[str, float]:
        return {v: float(x) for v, x in zip(self.interior, np.asarray(f, dtype=float))}

    def edge_dict(self, G) -> dict[str, float]:
        return {f"{a}->{b}": float(x) for (a, b), x in zip(self.edges, np.asarray(G, dtype=float))}

    # ------------------------------------------------------------- distances
    @cached_property
    def adjacency(self) -> csr_matrix:
        """Sparse matrix of edge lengths ``1/omega`` over all of ``V``."""
        nv = len(self.node_ids)
        rows = np.concatenate([self.tails, self.heads])
        cols = np.concatenate([self.heads, self.tails])
        data = np.concatenate([1.0 / self.w, 1.0 / self.w])
        return csr_matrix((data, (rows, cols)), shape=(nv, nv))

    @cached_property
    def dist(self) -> np.ndarray:
        """All-pairs shortest-path distances over ``V`` (read-only)."""
        d = shortest_path(self.adjacency, method="D", directed=False)
        d = np.minimum(d, d.T)  # path sums can differ in the last bit by direction
        d.setflags(write=False)
        return d

    @cached_property
    def dist_interior(self) -> np.ndarray:
        idx = np.flatnonzero(self._interior_mask)
        d = self.dist[np.ix_(idx, idx)].copy()
        d.setflags(write=False)
        return d

    @cached_property
    def boundary_dist(self) -> np.ndarray:
        """``d_B(u)`` for interior ``u``; ``inf`` when ``B`` is empty."""
        if not self.boundary:
            return np.full(self.n, math.inf)
        bidx = [self.index[b] for b in self.node_ids if b in self.boundary]
        idx = np.flatnonzero(self._interior_mask)
        return self.dist[np.ix_(idx, bidx)].min(axis=1)

    def diameter(self) -> float:
        """Largest finite distance between interior nodes."""
        d = self.dist_interior
        return float(d[np.isfinite(d)].max())

    @cached_property
    def components(self) -> list[list[str]]:
        """Connected components of the whole graph (boundary included)."""
        k, labels = _cc(self.adjacency, directed=False)
        return [[v for v, l in zip(self.node_ids, labels) if l == c] for c in range(k)]

    def is_connected(self) -> bool:
        return len(self.components) == 1


# ---------------------------------------------------------------------------
# operators


def incidence_apply(g: Graph, f) -> np.ndarray:
    """``Kf(u, v) = omega_uv (f(v) - f(u))`` on each stored edge, ``f = 0`` on ``B``."""
    F = g.extend(f)
    return g.w * (F[g.heads] - F[g.tails])


def divergence_apply(g: Graph, G) -> np.ndarray:
    """Discrete divergence ``(div G)(u) = sum_{v~u} omega_uv G(u, v)`` on interior nodes.

    It is the negative adjoint of ``K``: ``<Kf, G>_E = -<f, div G>``.
    """
    G = np.asarray(G, dtype=float)
    if G.shape != (g.m,):
        raise ValueError(f"edge function must have length {g.m}")
    out = np.zeros(len(g.node_ids))
    wg = g.w * G
    np.add.at(out, g.tails, wg)
    np.add.at(out, g.heads, -wg)
    return out[g._interior_mask]


def edge_inner(G, H) -> float:
    """``<G, H>_E``: half the sum over directed edges, one term per stored edge."""
    return float(np.dot(G, H))


def distance(g: Graph, u, v) -> float:
    try:
        return float(g.dist[g.index[str(u)], g.index[str(v)]])
    except KeyError as exc:
        raise KeyError(f"unknown node id {exc.args[0]}") from None


def boundary_distance(g: Graph, u) -> float:
    u = str(u)
    if u not in g.interior_index:
        raise KeyError(f"unknown interior node id {u}")
    return float(g.boundary_dist[g.interior_index[u]])


def connected_components(g: Graph, nodes: Iterable) -> list[list[str]]:
    """Components of the subgraph induced by ``nodes`` (interior ids), in node order."""
    keep = {str(v) for v in nodes}
    if not keep:
        return []
    unknown = keep - set(g.interior)
    if unknown:
        raise KeyError(f"not interior nodes: {sorted(unknown)}")
    parent = {v: v for v in keep}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in g.edges:
        if a in keep and b in keep:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb, key=g.index.__getitem__)] = min(ra, rb, key=g.index.__getitem__)
    groups: dict[str, list[str]] = {}
    for v in g.node_ids:
        if v in keep:
            groups.setdefault(find(v), []).append(v)
    return sorted(groups.values(), key=lambda c: g.index[c[0]])


# ---------------------------------------------------------------------------
# text formats


def parse_graph(text: str) -> Graph:
    """Parse the line-oriented ``GRAPH v1`` format."""
    lines = text.splitlines()
    header_seen = False
    order: list[str] = []
    boundary: set[str] = set()
    nu: dict[str, float] = {}
    declared: set[str] = set()
    edges: list[tuple[str, str]] = []
    omega: list[float] = []
    seen_edges: set[frozenset] = set()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not header_seen:
            if line.split() != ["GRAPH", "v1"]:
                raise GraphFormatError("expected header 'GRAPH v1'", lineno)
            header_seen = True
            continue
        tok = line.split()
        if tok[0] == "node":
            if len(tok) < 2:
                raise GraphFormatError("node line needs an id", lineno)
            v = tok[1]
            if v in declared:
                raise GraphFormatError(f"duplicate node {v}", lineno)
            is_bnd, measure = False, None
            for opt in tok[2:]:
                if opt == "boundary":
                    is_bnd = True
                elif opt.startswith("measure="):
                    try:
                        measure = float(opt.split("=", 1)[1])
                    except ValueError:
                        raise GraphFormatError(f"bad measure {opt!r}", lineno) from None
                else:
                    raise GraphFormatError(f"unknown node option {opt!r}", lineno)
            if is_bnd and measure is not None:
                raise GraphFormatError("boundary nodes may not carry a measure", lineno)
            if measure is not None and not (measure > 0 and math.isfinite(measure)):
                raise GraphFormatError(f"nonpositive nu at node {v}", lineno)
            if v not in order:
                order.append(v)
            declared.add(v)
            if is_bnd:
                boundary.add(v)
            elif measure is not None:
                nu[v] = measure
        elif tok[0] == "edge":
            if len(tok) != 4:
                raise GraphFormatError("edge line must be 'edge <id> <id> <omega>'", lineno)
            a, b = tok[1], tok[2]
            try:
                w = float(tok[3])
            except ValueError:
                raise GraphFormatError(f"bad omega {tok[3]!r}", lineno) from None
            if not (w > 0 and math.isfinite(w)):
                raise GraphFormatError(f"nonpositive omega on edge ({a},{b})", lineno)
            if a == b:
                raise GraphFormatError(f"self-loop at {a}", lineno)
            if frozenset((a, b)) in seen_edges:
                raise GraphFormatError(f"duplicate edge ({a},{b})", lineno)
            seen_edges.add(frozenset((a, b)))
            for v in (a, b):
                if v not in order:
                    order.append(v)
            edges.append((a, b))
            omega.append(w)
        else:
            raise GraphFormatError(f"unknown directive {tok[0]!r}", lineno)
    if not header_seen:
        raise GraphFormatError("empty file; expected header 'GRAPH v1'", 1)
    return Graph(tuple(order), frozenset(boundary), tuple(edges), tuple(omega), nu)


def load_graph(path) -> Graph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def dump_graph(g: Graph) -> str:
    out = ["GRAPH v1"]
    for v in g.node_ids:
        if v in g.boundary:
            out.append(f"node {v} boundary")
        elif g.nu[v] != 1.0:
            out.append(f"node {v} measure={g.nu[v]!r}")
        else:
            out.append(f"node {v}")
    for (a, b), w in zip(g.edges, g.omega):
        out.append(f"edge {a} {b} {w!r}")
    return "\n".join(out) + "\n"


def load_node_fn(g: Graph, path_or_text) -> np.ndarray:
    """Read a NodeFn JSON object (id -> number) from a path or a JSON string."""
    text = str(path_or_text)
    if not text.lstrip().startswith("{"):
        text = Path(text).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid NodeFn JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(data, dict):
        raise GraphFormatError("NodeFn JSON must be an object")
    data = {k: v for k, v in data.items() if k not in g.boundary}
    return g.node_fn(data)


def dump_node_fn(g: Graph, f) -> str:
    return json.dumps(g.as_dict(f))
