"""Tests for the flat-coordinate chart chain and the flat metrics."""

import pytest

from weylfrob.charts import transport
from weylfrob.flatcoords import (build_flat_chart, build_z_chart, chart_degrees,
                                 dual_index, flat_metrics)
from weylfrob.laurent import E_SYMBOL, Poly, QQ, rat
from weylfrob.pencil import eta_tau, metric_theta
from weylfrob.series import series_coeffs

CASES = [(3, 1, 0), (3, 1, 1), (3, 1, 2), (3, 2, 0), (3, 2, 1), (3, 3, 0),
         (4, 1, 0), (4, 1, 1), (4, 1, 2), (4, 1, 3), (4, 2, 0), (4, 2, 1),
         (4, 2, 2), (4, 3, 0), (4, 3, 1), (4, 4, 0),
         (5, 1, 1), (5, 1, 2), (5, 2, 2), (5, 3, 1)]


def test_degrees_frozen():
    assert chart_degrees(4, 1, 0) == (QQ(1), rat(5) / 6, rat(1) / 2, rat(1) / 6, QQ(0))
    assert chart_degrees(3, 1, 0) == (QQ(1), rat(3) / 4, rat(1) / 4, QQ(0))
    assert chart_degrees(5, 1, 2) == (QQ(1), rat(3) / 4, rat(1) / 4,
                                      rat(3) / 4, rat(1) / 4, QQ(0))


@pytest.mark.parametrize("l,k,m", CASES)
def test_degree_duality(l, k, m):
    d = chart_degrees(l, k, m)
    assert dual_index(l, k, m, k) == l + 1
    assert dual_index(l, k, m, l + 1) == k
    for i in range(1, l + 2):
        j = dual_index(l, k, m, i)
        assert dual_index(l, k, m, j) == i
        assert d[i - 1] + d[j - 1] == 1


def test_bad_arguments():
    with pytest.raises(ValueError):
        chart_degrees(3, 1, 3)
    with pytest.raises(ValueError):
        chart_degrees(2, 3, 0)
    with pytest.raises(ValueError):
        dual_index(3, 1, 0, 5)


def test_shear_and_mixing_values():
    zc = build_z_chart(3, 1, 0)
    ring = zc.tau_of_z.old.ring
    zring = zc.chart.ring
    assert zc.p[1] == Poly.var(ring, E_SYMBOL, 1, -2)
    want = Poly.var(zring, "z2") + Poly.var(zring, "z3", 1, rat(1) / 6)
    assert zc.tau_of_z.images["tau2"] == want
    assert series_coeffs("cosh_sinh", 1, 1)[1] == rat(1) / 6

    zc = build_z_chart(4, 1, 2)
    zring = zc.chart.ring
    want = Poly.var(zring, "z3") + Poly.var(zring, "z4", 1, rat(-1) / 3)
    assert zc.tau_of_z.images["tau3"] == want
    assert series_coeffs("tanh", 1, 1)[1] == rat(-1) / 3


def test_flat_chart_small_rank_values():
    fc = build_flat_chart(3, 1, 0)
    ring = fc.chart.ring
    t1 = Poly.var(ring, "t1")
    t2 = Poly.var(ring, "t2")
    t3 = Poly.var(ring, "t3")
    E = Poly.var(ring, E_SYMBOL)
    assert fc.tau_of_t.images["tau1"] == t1 + E.scale(2)
    assert fc.tau_of_t.images["tau2"] == t2 * t3 + Poly.var(ring, "t3", 4, rat(1) / 6)
    assert fc.tau_of_t.images["tau3"] == Poly.var(ring, "t3", 4)
    assert fc.z_images["z2"] == t2 * t3
    assert fc.z_images["z3"] == Poly.var(ring, "t3", 4)
    assert set(fc.h) == {2} and fc.h[2].is_zero()
    assert fc.y_of_t.images["y1"] == t1 - E.scale(4)
    assert fc.eta[0, 3] == Poly.const(ring, 1)
    assert fc.eta[1, 2] == Poly.const(ring, 2)
    assert fc.md.g[2, 3] == Poly.var(ring, "t3", 1, rat(1) / 4)
    assert fc.md.g[3, 3] == Poly.const(ring, 1)


def test_flat_chart_degenerate_blocks():
    fc = build_flat_chart(3, 1, 1)
    ring = fc.chart.ring
    assert fc.eta[1, 1] == Poly.const(ring, 1)
    assert fc.eta[2, 2] == Poly.const(ring, 1)
    assert fc.eta[0, 3] == Poly.const(ring, 1)


def test_interior_block_entries():
    fc = build_flat_chart(4, 1, 0)
    ring = fc.chart.ring
    assert fc.eta[2, 2] == Poly.const(ring, 12)
    assert fc.h[2] == Poly.var(fc.h[2].vars, "w3", 2, rat(-1) / 12)
    fc = build_flat_chart(5, 1, 1)
    ring = fc.chart.ring
    assert fc.eta[2, 2] == Poly.const(ring, 12)
    assert fc.eta[4, 4] == Poly.const(ring, 1)


@pytest.mark.parametrize("l,k,m", CASES)
def test_flat_metrics_all_cases(l, k, m):
    fm = flat_metrics(build_flat_chart(l, k, m))
    assert fm.eta == fm.chart.eta
    for i in range(l + 1):
        for j in range(l + 1):
            assert fm.eta[i, j] == fm.eta[j, i]


@pytest.mark.parametrize("l,k,m", [(3, 1, 0), (3, 2, 1), (4, 1, 2), (4, 2, 0),
                                   (5, 1, 2)])
def test_single_jump_transport_matches_chain(l, k, m):
    fc = build_flat_chart(l, k, m)
    ed = eta_tau(l, k, m)
    comp = ed.tau.theta_of_tau.then(fc.tau_of_t)
    md = transport(metric_theta(l, k).md, comp)
    assert md.g == fc.md.g
    for a, b in zip(md.gamma, fc.md.gamma):
        assert a == b


def test_jacobian_inverse_roundtrip():
    fc = build_flat_chart(3, 2, 1)
    n = fc.jac.shape[0]
    prod = fc.jac * fc.jac_inv
    ring = fc.chart.ring
    for i in range(n):
        for j in range(n):
            want = Poly.const(ring, 1 if i == j else 0)
            assert prod[i, j] == want
