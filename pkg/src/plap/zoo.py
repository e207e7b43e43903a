"""Small named graphs used as examples, fixtures and oracles."""

from __future__ import annotations

import itertools

import numpy as np

from .graph_core import Graph


def path(n: int, boundary=()) -> Graph:
    """Unweighted path ``1 - 2 - ... - n``."""
    return Graph.from_edges([(i, i + 1) for i in range(1, n)], nodes=range(1, n + 1), boundary=boundary)


def cycle(n: int) -> Graph:
    return Graph.from_edges([(i, i % n + 1) for i in range(1, n + 1)], nodes=range(1, n + 1))


def complete(n: int) -> Graph:
    return Graph.from_edges(itertools.combinations(range(1, n + 1), 2), nodes=range(1, n + 1))


def star(leaves: int = 3, weights=None) -> Graph:
    """Star with center ``1`` and leaves ``2..leaves+1``."""
    weights = weights or [1.0] * leaves
    return Graph.from_edges([(1, i + 2, w) for i, w in enumerate(weights)], nodes=range(1, leaves + 2))


def weighted_star() -> Graph:
    """Star with edge weights 2, 1, 3/2 from the center ``1`` to ``2, 3, 4``."""
    return star(3, [2.0, 1.0, 1.5])


def diamond() -> Graph:
    """Four-node graph: a 4-cycle ``1-2-3-4`` plus the chord ``2-4``."""
    return Graph.from_edges([(1, 2), (1, 4), (4, 3), (4, 2), (2, 3)], nodes=range(1, 5))


def weighted_triangle(p: float) -> Graph:
    """Triangle whose p-energy is ``5|x1-x2|^p + |x1-x3|^p + 1.5|x2-x3|^p``."""
    return Graph.from_edges([(1, 2, 5.0 ** (1 / p)), (1, 3, 1.0), (2, 3, 1.5 ** (1 / p))], nodes=(1, 2, 3))


def tripod(n: int) -> Graph:
    """Center ``v`` with three legs ``x1..xn``, ``y1..yn``, ``z1..zn``."""
    edges = []
    for leg in "xyz":
        prev = "v"
        for i in range(1, n + 1):
            edges.append((prev, f"{leg}{i}"))
            prev = f"{leg}{i}"
    nodes = ["v"] + [f"{leg}{i}" for leg in "xyz" for i in range(1, n + 1)]
    return Graph.from_edges(edges, nodes=nodes)


def tripod_function(g: Graph, n: int) -> np.ndarray:
    """Test function on :func:`tripod`: linear on two legs, oscillating on the third."""
    vals = {"v": 0.0}
    for i in range(1, n + 1):
        vals[f"x{i}"] = i / n
        vals[f"y{i}"] = -i / n
        vals[f"z{i}"] = (-1) ** i / (2 * n)
    return g.node_fn(vals)


def thirteen() -> Graph:
    """Tree on 13 nodes with three branches hanging off node 4."""
    edges = [(1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (5, 7), (4, 8), (8, 9), (8, 10),
             (4, 11), (11, 12), (11, 13)]
    return Graph.from_edges(edges, nodes=range(1, 14))


def thirteen_function(g: Graph) -> np.ndarray:
    vals = {str(v): 0.0 for v in range(1, 14)}
    for v in (1, 2, 3, 11, 12, 13):
        vals[str(v)] = 1.0
    for v in (5, 6, 7, 8, 9, 10):
        vals[str(v)] = -1.0
    return g.node_fn(vals)


def random_graph(rng: np.random.Generator, n: int, *, p_edge: float = 0.4, weighted: bool = True,
                 boundary: int = 0, connected: bool = True) -> Graph:
    """Random graph on ``n`` interior nodes plus ``boundary`` boundary nodes.

    A random spanning tree is added first when ``connected`` so the result is connected.
    """
    total = n + boundary
    nodes = [str(i) for i in range(1, total + 1)]
    pairs = set()
    if connected:
        # spanning tree on the interior, then each boundary node hangs off an interior node
        order = rng.permutation(n)
        for i in range(1, n):
            j = int(rng.integers(0, i))
            a, b = sorted((int(order[i]), int(order[j])))
            pairs.add((a, b))
        for bi in range(n, total):
            pairs.add((int(rng.integers(0, n)), bi))
    for a, b in itertools.combinations(range(total), 2):
        if rng.random() < p_edge:
            pairs.add((a, b))
    bnd = [nodes[i] for i in range(n, total)]
    # edges between two boundary nodes carry no information
    edges = []
    for a, b in sorted(pairs):
        if a >= n and b >= n:
            continue
        w = float(rng.uniform(0.5, 2.0)) if weighted else 1.0
        edges.append((nodes[a], nodes[b], w))
    nu = {nodes[i]: float(rng.uniform(0.5, 2.0)) for i in range(n)} if weighted else None
    return Graph.from_edges(edges, nodes=nodes, boundary=bnd, nu=nu)
