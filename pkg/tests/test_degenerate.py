import math
import warnings

import numpy as np
import pytest

from plap import zoo
from plap.degenerate import (
    cone_eigenfunction,
    inf_eigenspace_span,
    one_lap_nodal_generators,
    perfect_nodal_constructor,
    sp_l_check,
    sp_witness,
    verify_1_eigenpair,
    verify_inf_eigenpair,
    verify_viscosity,
)
from plap.geometry import independence_alpha
from plap.graph_core import divergence_apply
from plap.nodal import classify_support_components, nodal_domains
from plap.plap_core import Kind, rayleigh_p

CONE7 = np.array([1, 2 / 3, 1 / 3, 0, -1 / 3, -2 / 3, -1])


def _check_equation(g, cert, tol=1e-9):
    """-div Xi = Lambda nu xi, checked independently of the LP."""
    lhs = -divergence_apply(g, cert.Xi)
    np.testing.assert_allclose(lhs, cert.Lambda * g.nu_vec * cert.xi, atol=tol)


@pytest.mark.parametrize("A, L", [([1, 2, 3], 1 / 3), ([1, 2], 1 / 2), ([3, 4, 5], 2 / 3), ([1], 1.0), ([2], 2.0)])
def test_verify_1_p7_indicators(p7, A, L):
    cert = verify_1_eigenpair(p7, p7.indicator(A), L)
    assert cert.feasible and cert.reason == ""
    _check_equation(p7, cert)
    assert np.max(np.abs(cert.Xi)) <= 1 + 1e-12 and np.max(np.abs(cert.xi)) <= 1 + 1e-12


def test_verify_1_rayleigh_mismatch(p7):
    cert = verify_1_eigenpair(p7, p7.indicator([1, 2, 3]), 0.5)
    assert not cert and cert.reason == "rayleigh-mismatch"


def test_verify_1_two_domain_functions(p7):
    # opposite signs on the two far blocks: an eigenfunction at 1/3
    f = p7.indicator([1, 2, 3]) - p7.indicator([5, 6, 7])
    assert verify_1_eigenpair(p7, f, 1 / 3)
    # equal signs force Xi = -1 and +1 on both edges at node 4, so -div Xi(4) = -2 which
    # Lambda * xi_4 in [-1/3, 1/3] cannot match
    same = p7.indicator([1, 2, 3]) + p7.indicator([5, 6, 7])
    cert = verify_1_eigenpair(p7, same, 1 / 3)
    assert not cert and cert.reason == "infeasible"
    adj = p7.indicator([1, 2, 3]) - p7.indicator([4, 5, 6])
    assert not verify_1_eigenpair(p7, adj, rayleigh_p(p7, adj, 1))


def test_verify_1_listed_xi_values(p7):
    """The listed edge values solve the equation on nodes 1..5 but need |xi_6| = 2 at node 6."""
    Xi = np.array([-1 / 3, -2 / 3, -1, -2 / 3, -2 / 3, 0.0])
    lhs = -divergence_apply(p7, Xi)
    np.testing.assert_allclose(lhs[:3], 1 / 3)
    assert np.all(np.abs(lhs[3:5]) <= 1 / 3 + 1e-15)
    assert lhs[5] == pytest.approx(-2 / 3)
    # the LP still finds a valid selection
    assert verify_1_eigenpair(p7, p7.indicator([1, 2, 3]), 1 / 3)


def test_verify_inf_star(star):
    f = np.array([1.0, 0, -1, -1 / 3])
    cert = verify_inf_eigenpair(star, f, 2.0)
    assert cert
    _check_equation(star, cert)
    e = cert.Xi[star.edge_of("1", "3")[0]]
    assert e == pytest.approx(-1.0)
    np.testing.assert_allclose(cert.xi, [0.5, 0, -0.5, 0], atol=1e-12)
    w = sp_witness(star, f)
    assert w is not None and w.path == ["3", "1"] and w.Lambda == pytest.approx(2.0)


def test_verify_inf_cone_difference(p7):
    assert verify_inf_eigenpair(p7, CONE7, 1 / 3)
    w = sp_witness(p7, CONE7)
    assert w is not None and set(w.path) == {str(i) for i in range(1, 8)} and w.Lambda == pytest.approx(1 / 3)


def test_verify_inf_single_spike(p7):
    # R_inf(1_{1}) = 1, yet node 2 would need -div Xi(2) = -1 with xi_2 = 0
    f = p7.indicator([1])
    cert = verify_inf_eigenpair(p7, f, 1.0)
    assert not cert and cert.reason == "infeasible"
    assert verify_inf_eigenpair(p7, f, 0.7).reason == "rayleigh-mismatch"
    assert sp_witness(p7, p7.indicator([2])) is None


def test_verify_inf_warns_on_weighted_measure():
    g = zoo.path(3).with_weights(nu={"1": 2.0, "2": 1.0, "3": 1.0})
    with pytest.warns(UserWarning):
        verify_inf_eigenpair(g, np.array([1.0, 0, -1]), rayleigh_p(g, np.array([1.0, 0, -1]), math.inf))


def test_viscosity_examples(p7):
    assert verify_viscosity(p7, CONE7, 1 / 3).ok
    assert verify_viscosity(p7, np.ones(7), 0.0).ok
    g = zoo.tripod(2)
    f = zoo.tripod_function(g, 2)
    rep = verify_viscosity(g, f, 0.5)
    assert not rep.ok
    assert rep.residuals["z1"] == pytest.approx(0.375)
    r = nodal_domains(g, f)
    assert (r.SN, r.WN, r.PN) == (4, 3, 2)


def test_cone_examples(p7):
    e = cone_eigenfunction(p7, ("1", "7"))
    np.testing.assert_allclose(e.f, CONE7, atol=1e-15)
    assert e.lam == pytest.approx(1 / 3) and e.kind is Kind.CONSTRUCTED
    pb = zoo.path(7, boundary=(4,))
    e = cone_eigenfunction(pb, "1")
    assert e.lam == pytest.approx(1 / 3)
    np.testing.assert_allclose(e.f, [1, 2 / 3, 1 / 3, 0, 0, 0], atol=1e-15)
    assert verify_inf_eigenpair(pb, e.f, e.lam)
    with pytest.raises(ValueError):
        cone_eigenfunction(zoo.path(7, boundary=(2,)), ("3", "7"))
    with pytest.raises(ValueError):
        cone_eigenfunction(p7, "1")


def test_eigenspace_span(p7):
    with pytest.raises(ValueError):
        inf_eigenspace_span(p7, [("1", "5"), ("3", "7")], [], 0.5)
    with pytest.raises(ValueError):
        inf_eigenspace_span(zoo.cycle(6), [("1", "4"), ("2", "5")], [], 2 / 3)
    samples = inf_eigenspace_span(p7, [("1", "7")], [], 1 / 3, samples=6)
    for e in samples:
        nz = np.abs(CONE7) > 0
        assert np.ptp(e.f[nz] / CONE7[nz]) < 1e-12 and not np.any(e.f[~nz])
        assert verify_inf_eigenpair(p7, e.f, 1 / 3)


def test_span_with_singles():
    g = zoo.path(9, boundary=(1, 9))
    for e in inf_eigenspace_span(g, [], ["3", "7"], 0.5, samples=5):
        assert verify_inf_eigenpair(g, e.f, 0.5)


def test_one_lap_generators(p7):
    f = p7.indicator([1, 2, 3]) - p7.indicator([5, 6, 7])
    out = one_lap_nodal_generators(p7, f, 1 / 3, 0.3, [1.0], [1.0])
    np.testing.assert_allclose(out, 0.1 * p7.indicator([1, 2, 3]) - 0.7 / 3 * p7.indicator([5, 6, 7]))
    assert verify_1_eigenpair(p7, out, 1 / 3)
    pos = one_lap_nodal_generators(p7, f, 1 / 3, 1.0, [1.0], [1.0])
    assert np.all(pos >= 0) and verify_1_eigenpair(p7, pos, 1 / 3)
    with pytest.raises(ValueError):
        one_lap_nodal_generators(p7, p7.indicator([1, 2, 3]), 1 / 3, 0.5, [1.0], [1.0])


def test_one_lap_generators_thirteen():
    g = zoo.thirteen()
    f = zoo.thirteen_function(g)
    L = rayleigh_p(g, f, 1)
    assert L == pytest.approx(1 / 3) and verify_1_eigenpair(g, f, L)
    doms = nodal_domains(g, f).strong_domains
    n_pos = sum(1 for sgn, _ in doms if sgn > 0)
    n_neg = len(doms) - n_pos
    assert n_pos == 2
    out = one_lap_nodal_generators(g, f, L, 0.5, [0.2, 0.8], [1.0 / n_neg] * n_neg)
    assert verify_1_eigenpair(g, out, L)


def test_sp_l_check(p7):
    assert sp_l_check(p7, CONE7, 6)
    assert not sp_l_check(p7, p7.indicator([1]) - p7.indicator([7]), 6)
    with pytest.raises(ValueError):
        sp_l_check(p7, CONE7, 0)
    with pytest.raises(ValueError):
        sp_l_check(zoo.weighted_star(), np.ones(4), 1)


@pytest.mark.parametrize("l, pn", [(6, 2), (2, 4)])
def test_perfect_nodal_paths(p7, l, pn):
    e = perfect_nodal_constructor(p7, l)
    assert e.lam == pytest.approx(2 / l)
    assert nodal_domains(p7, e.f).PN >= independence_alpha(p7, l)[0] == pn
    assert verify_inf_eigenpair(p7, e.f, e.lam)


def test_perfect_nodal_cycle(c5):
    e = perfect_nodal_constructor(c5, 2)
    assert e.lam == pytest.approx(1.0)
    assert nodal_domains(c5, e.f).PN >= independence_alpha(c5, 2)[0] - e.info["beta_loops"]
    assert verify_inf_eigenpair(c5, e.f, 1.0)


def test_equal_component_existence():
    warnings.simplefilter("ignore")
    for g in (zoo.path(7), zoo.cycle(6), zoo.tripod(3), zoo.thirteen(), zoo.path(6, boundary=(1,))):
        cands = [(u,) for u in g.interior] if g.boundary else []
        cands += [(a, b) for i, a in enumerate(g.interior) for b in g.interior[i + 1:]]
        for c in cands:
            try:
                e = cone_eigenfunction(g, c)
            except ValueError:
                continue
            if not verify_inf_eigenpair(g, e.f, e.lam):
                continue
            comps = classify_support_components(g, e.f)
            assert comps["equal"]
            if verify_viscosity(g, e.f, e.lam).ok:
                assert not comps["super"] and not comps["sub"]
