import math
import itertools

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import graphs
from plap import zoo
from plap.graph_core import (
    Graph,
    GraphFormatError,
    boundary_distance,
    connected_components,
    distance,
    divergence_apply,
    dump_graph,
    dump_node_fn,
    incidence_apply,
    load_graph,
    load_node_fn,
    parse_graph,
)


def test_load_p7(data_dir):
    g = load_graph(data_dir / "graphs" / "p7.graph")
    assert (g.n, g.m) == (7, 6)
    assert g.interior == tuple(str(i) for i in range(1, 8))


def test_load_star(data_dir):
    g = load_graph(data_dir / "graphs" / "star.graph")
    assert (g.n, g.m) == (4, 3)
    assert sorted(g.omega) == [1.0, 1.5, 2.0]


@pytest.mark.parametrize("text, msg", [
    ("GRAPH v1\nedge 1 2 0\n", "nonpositive omega"),
    ("GRAPH v1\nedge 1 2 -1\n", "nonpositive omega"),
    ("GRAPH v1\nnode 1 measure=0\n", "nonpositive nu"),
    ("GRAPH v1\nedge 1 2 1\nedge 2 1 1\n", "duplicate"),
    ("GRAPH v2\n", "GRAPH v1"),
    ("GRAPH v1\nnode 1 boundary measure=2\n", "boundary"),
    ("GRAPH v1\nedge 1 1 1\n", "self-loop"),
    ("GRAPH v1\nvertex 1\n", "line 2"),
])
def test_parse_errors(text, msg):
    with pytest.raises(GraphFormatError, match=msg):
        parse_graph(text)


def test_round_trip():
    g = zoo.path(5, boundary=(1,)).with_weights([1.0, 2.5, 1.0, 3.0], nu={"2": 1, "3": 1, "4": 0.5, "5": 2})
    h = parse_graph(dump_graph(g))
    assert h.node_ids == g.node_ids and h.boundary == g.boundary
    assert h.edges == g.edges and h.omega == g.omega
    np.testing.assert_array_equal(h.nu_vec, g.nu_vec)


def test_implicit_nodes_are_interior():
    g = parse_graph("GRAPH v1\nnode b boundary\nedge a b 1\nedge a c 2\n")
    assert g.interior == ("a", "c") and g.boundary == frozenset({"b"})


def test_distances():
    p7 = zoo.path(7)
    assert distance(p7, 1, 7) == 6
    assert distance(zoo.weighted_star(), 2, 3) == pytest.approx(1.5)
    two = Graph.from_edges([], nodes=["a", "b"])
    assert distance(two, "a", "b") == math.inf
    with pytest.raises(KeyError):
        distance(p7, 1, 99)


def test_boundary_distance():
    assert boundary_distance(zoo.path(7), 4) == math.inf
    assert boundary_distance(zoo.path(7, boundary=(1,)), 4) == 3
    assert boundary_distance(zoo.path(7, boundary=(1, 7)), 4) == 3


def test_incidence_examples():
    p7 = zoo.path(7)
    assert not np.any(incidence_apply(p7, np.full(7, 3.0)))
    cone = np.array([1, 2 / 3, 1 / 3, 0, -1 / 3, -2 / 3, -1])
    np.testing.assert_allclose(incidence_apply(p7, cone), -1 / 3)
    pb = zoo.path(7, boundary=(4,))
    Kf = incidence_apply(pb, pb.indicator([1, 2, 3]))
    assert Kf[pb.edge_of("3", "4")[0]] == -1


def test_divergence_examples():
    p7 = zoo.path(7)
    assert not np.any(divergence_apply(p7, np.zeros(6)))
    d = divergence_apply(p7, incidence_apply(p7, p7.indicator([1, 2, 3])))
    # -div K f is the linear Laplacian: +1 at node 3 and -1 at node 4
    np.testing.assert_array_equal(-d, [0, 0, 1, -1, 0, 0, 0])


def test_components():
    p7 = zoo.path(7)
    assert connected_components(p7, [1, 2, 3]) == [["1", "2", "3"]]
    assert connected_components(p7, [1, 2, 5, 6]) == [["1", "2"], ["5", "6"]]
    assert connected_components(p7, []) == []


def test_node_fn_json_round_trip(tmp_path):
    g = zoo.diamond()
    f = np.array([0.5, -1, 2, 0])
    path = tmp_path / "f.json"
    path.write_text(dump_node_fn(g, f))
    np.testing.assert_array_equal(load_node_fn(g, path), f)
    with pytest.raises(ValueError, match="missing"):
        load_node_fn(g, '{"1": 1}')


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_adjointness(g):
    rng = np.random.default_rng(g.m)
    f, G = rng.standard_normal(g.n), rng.standard_normal(g.m)
    lhs = incidence_apply(g, f) @ G
    rhs = f @ -divergence_apply(g, G)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, np.abs(f).sum() * np.abs(G).sum())


@settings(max_examples=40, deadline=None)
@given(graphs(n_max=10))
def test_distance_matches_bellman_ford(g):
    ids = g.node_ids
    D = {(u, v): (0.0 if u == v else math.inf) for u in ids for v in ids}
    for _ in range(len(ids)):
        for (a, b), w in zip(g.edges, g.omega):
            for x, y in ((a, b), (b, a)):
                for s in ids:
                    if D[s, x] + 1 / w < D[s, y]:
                        D[s, y] = D[s, x] + 1 / w
    for u, v in itertools.product(ids, ids):
        assert distance(g, u, v) == pytest.approx(D[u, v], rel=1e-12, abs=0)
    for u, v, w in itertools.islice(itertools.product(ids, ids, ids), 300):
        assert distance(g, u, w) <= distance(g, u, v) + distance(g, v, w) + 1e-12
        assert distance(g, u, v) == distance(g, v, u)


def test_antisymmetry_by_storage():
    g = zoo.diamond()
    f = np.array([1.0, 2, 3, 5])
    Kf = incidence_apply(g, f)
    for (a, b), w, k in zip(g.edges, g.omega, Kf):
        assert k == w * (f[g.index[b]] - f[g.index[a]])
    # the reverse orientation is never stored
    assert all((b, a) not in g.edge_index for a, b in g.edges)
