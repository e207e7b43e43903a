import itertools
import math

import numpy as np
import pytest

from conftest import seeded_graphs
from plap import zoo
from plap.geometry import (
    CapExceeded,
    cheeger_hk,
    dirichlet_h1,
    dirichlet_Hk,
    independence_alpha,
    isoperimetric_c,
    matching_number,
    packing_radius,
    spectral_min_partition,
    st_subpartition_bound,
)


def _brute_cheeger(g, k):
    """Oracle: all assignments of nodes to k labelled blocks or to 'unused'."""
    best = math.inf
    nodes = list(g.interior)
    for lab in itertools.product(range(k + 1), repeat=len(nodes)):
        blocks = [[v for v, l in zip(nodes, lab) if l == j] for j in range(1, k + 1)]
        if any(not b for b in blocks):
            continue
        best = min(best, max(isoperimetric_c(g, b) for b in blocks))
    return best


def test_isoperimetric_examples(p7):
    assert isoperimetric_c(p7, [1, 2, 3]) == pytest.approx(1 / 3)
    assert isoperimetric_c(p7, [3, 4, 5]) == pytest.approx(2 / 3)
    assert isoperimetric_c(p7, p7.interior) == 0
    with pytest.raises(ValueError):
        isoperimetric_c(p7, [])


def test_cheeger_p7(p7):
    vals = [cheeger_hk(p7, k)[0] for k in range(1, 8)]
    assert vals == pytest.approx([0, 1 / 3, 2 / 3, 1, 2, 2, 2], abs=1e-12)
    _, fam = cheeger_hk(p7, 3)
    flat = sum(fam.sets, [])
    assert len(flat) == len(set(flat)) and all(fam.sets)


@pytest.mark.parametrize("k", range(2, 6))
def test_cheeger_cycle(c5, k):
    assert cheeger_hk(c5, k)[0] == pytest.approx(2 / (5 // k))


def test_cheeger_k1_is_zero_without_boundary(c5):
    # the closed form 2/floor(N/k) applies from k = 2; the whole node set has c = 0
    assert cheeger_hk(c5, 1)[0] == 0


@pytest.mark.parametrize("g", seeded_graphs(6, n_max=6), ids=lambda g: f"n{g.n}m{g.m}")
def test_cheeger_matches_brute_force(g):
    for k in range(1, min(g.n, 3) + 1):
        assert cheeger_hk(g, k)[0] == pytest.approx(_brute_cheeger(g, k), rel=1e-12)


def test_dirichlet_h1(p7):
    assert dirichlet_h1(p7, [1, 2, 3]) == pytest.approx(1 / 3)
    assert dirichlet_h1(p7, [3, 4, 5]) == pytest.approx(2 / 3)
    assert dirichlet_h1(p7, [4]) == pytest.approx(isoperimetric_c(p7, [4]))


def test_dirichlet_Hk(p7):
    assert dirichlet_Hk(p7, 2)[0] == pytest.approx(1 / 3)
    s4 = zoo.star(4)
    assert dirichlet_Hk(s4, 2)[0] == pytest.approx(cheeger_hk(s4, 2)[0])
    H = [dirichlet_Hk(p7, k)[0] for k in range(1, 8)]
    assert all(b >= a - 1e-12 for a, b in zip(H, H[1:]))


def test_paths_and_stars_have_equal_H_and_h():
    for g in (zoo.path(5), zoo.path(6), zoo.star(3), zoo.star(5)):
        for k in range(1, g.n + 1):
            assert dirichlet_Hk(g, k)[0] == pytest.approx(cheeger_hk(g, k)[0], abs=1e-12)


def test_caps():
    big = zoo.path(13)
    with pytest.raises(CapExceeded):
        dirichlet_Hk(big, 2)
    with pytest.raises(CapExceeded):
        cheeger_hk(zoo.path(17), 2)


def test_packing_examples(p7):
    R = [packing_radius(p7, k)[0] for k in range(1, 8)]
    assert R == [math.inf, 3, 1.5, 1, 0.5, 0.5, 0.5]
    _, w = packing_radius(p7, 3)
    assert w.min_pair_distance >= 2 * w.R - 1e-12 and w.min_boundary_distance >= w.R - 1e-12
    for N in (5, 6, 7, 8):
        c = zoo.cycle(N)
        for k in range(2, N + 1):
            assert 2 * packing_radius(c, k)[0] == N // k


def test_packing_with_boundary():
    g = zoo.path(7, boundary=(1,))
    R, w = packing_radius(g, 1)
    assert R == 6 and w.nodes == ["7"]


def test_independence_examples(p7):
    assert independence_alpha(p7, 2) == (4, ["1", "3", "5", "7"])
    assert independence_alpha(p7, 6)[0] == 2
    assert independence_alpha(zoo.complete(5), 2)[0] == 1
    assert independence_alpha(p7, 7)[0] == 1
    with pytest.raises(ValueError):
        independence_alpha(p7, 0)


def test_matching_examples(p7):
    assert matching_number(p7)[0] == 3
    assert matching_number(zoo.complete(3))[0] == 1
    beta, M = matching_number(zoo.path(6))
    assert beta == 3 and len({v for e in M for v in e}) == 6


def test_st_bound():
    p7 = zoo.path(7)
    assert st_subpartition_bound(p7, 2)[0] == pytest.approx(1 / 3)
    assert st_subpartition_bound(p7, 1)[0] == 0
    for k in range(1, 6):
        assert st_subpartition_bound(p7, k)[0] == pytest.approx(dirichlet_Hk(p7, k)[0])
    k3 = zoo.complete(3)
    assert st_subpartition_bound(k3, 3)[0] == pytest.approx(2)


def test_partition_examples(p7):
    for mode in ("disjoint", "nonadjacent"):
        val, fam = spectral_min_partition(p7, 2, mode, 1)
        assert 1 / val == pytest.approx(3)
    assert 0.5 * sum(1 / spectral_min_partition(p7, 2, m, 1)[0] for m in ("disjoint", "nonadjacent")) \
        == pytest.approx(packing_radius(p7, 2)[0])
    assert spectral_min_partition(p7, 1, "disjoint", 1)[0] == 0


@pytest.mark.parametrize("g", seeded_graphs(25, n_max=9), ids=lambda g: f"n{g.n}m{g.m}b{len(g.boundary)}")
def test_invariants_on_random_graphs(g):
    h = [cheeger_hk(g, k)[0] for k in range(1, g.n + 1)]
    assert all(b >= a - 1e-12 for a, b in zip(h, h[1:]))
    R = [packing_radius(g, k)[0] for k in range(1, g.n + 1)]
    assert all(b <= a + 1e-12 for a, b in zip(R, R[1:]))
    if g.n <= 9:
        for k in range(1, min(g.n, 4) + 1):
            assert dirichlet_Hk(g, k)[0] <= h[k - 1] + 1e-12
    half = 1 / (2 * min(g.omega))
    for k in (2, 3):
        if k > g.n:
            continue
        a = 1 / spectral_min_partition(g, k, "disjoint", 1)[0]
        b = 1 / spectral_min_partition(g, k, "nonadjacent", 1)[0]
        assert R[k - 1] - 1e-9 <= a <= R[k - 1] + half + 1e-9
        assert R[k - 1] - half - 1e-9 <= b <= R[k - 1] + 1e-9


@pytest.mark.parametrize("seed", range(12))
def test_independence_packing_inequality(seed):
    rng = np.random.default_rng([9, seed])
    g = zoo.random_graph(rng, int(rng.integers(4, 10)), weighted=False)
    diam = int(g.diameter())
    alphas = [independence_alpha(g, l)[0] for l in range(1, diam + 1)]
    assert all(b <= a for a, b in zip(alphas, alphas[1:]))
    for l, a in zip(range(1, diam + 1), alphas):
        assert packing_radius(g, a)[0] >= l / 2 - 1e-12


def test_generic_simplicity_of_subset_values():
    rng = np.random.default_rng(50)
    base = zoo.path(7)
    for _ in range(50):
        g = base.with_weights(tuple(rng.uniform(0.5, 2.0, base.m)),
                              nu={v: float(rng.uniform(0.5, 2.0)) for v in base.interior})
        vals = sorted(isoperimetric_c(g, [g.interior[i] for i in range(7) if m >> i & 1]) for m in range(1, 128))
        assert np.all(np.diff(vals) > 1e-12)
