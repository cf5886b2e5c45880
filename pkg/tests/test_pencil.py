"""Tests for the metric pencil: extraction, oracles, tau chart, eta."""

import pytest

from weylfrob.charts import LOG, transport
from weylfrob.laurent import E_SYMBOL, Poly, QQ
from weylfrob.pencil import (
    check_mu_gamma,
    check_mu_metric,
    check_p_properties,
    check_pencil_linearity,
    eta_tau,
    metric_theta,
    tau_chart,
    unity_coeffs,
)


def test_rank_one_metric_table():
    pd = metric_theta(1, 1)
    ring = pd.chart.ring
    th0 = Poly.var(ring, "th0")
    th1 = Poly.var(ring, "th1")
    assert pd.md.g[0, 0] == th0 * th0
    assert pd.md.g[0, 1] == th0 * th1
    assert pd.md.g[1, 0] == th0 * th1
    assert pd.md.g[1, 1] == (th0 * th0).scale(4)
    # symbols: only four nonzero entries
    assert pd.md.gamma[0][0, 0] == th0
    assert pd.md.gamma[1][0, 1] == th0
    assert pd.md.gamma[0][1, 0] == th1
    assert pd.md.gamma[0][1, 1] == th0.scale(4)
    assert pd.md.gamma[1][0, 0].is_zero()
    assert pd.md.gamma[0][0, 1].is_zero()
    assert pd.md.gamma[1][1, 0].is_zero()
    assert pd.md.gamma[1][1, 1].is_zero()
    assert pd.ext_corner == 1
    assert pd.ext_row[1] == th1


def test_bad_arguments_rejected():
    with pytest.raises(ValueError):
        metric_theta(3, 0)
    with pytest.raises(ValueError):
        metric_theta(3, 4)
    with pytest.raises(ValueError):
        unity_coeffs(3, 1, 3)
    with pytest.raises(ValueError):
        unity_coeffs(3, 1, -1)


@pytest.mark.parametrize("l,k", [(l, k) for l in range(1, 5) for k in range(1, l + 1)])
def test_generating_function_against_torus_oracle(l, k):
    # two independent code paths: coefficient extraction vs chain rule
    check_p_properties(l, k)
    check_mu_metric(l, k)
    check_mu_gamma(l, k)


@pytest.mark.parametrize("l,k", [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3)])
def test_symbols_are_compatible_with_the_metric(l, k):
    pd = metric_theta(l, k)
    g, gam = pd.md.g, pd.md.gamma
    n = l + 1
    for i in range(n):
        for j in range(n):
            for s in range(n):
                assert g[i, j].diff("th%d" % s) == gam[s][i, j] + gam[s][j, i]
    for i in range(n):
        for j in range(n):
            for r in range(n):
                lhs = Poly.zero(pd.chart.ring)
                rhs = Poly.zero(pd.chart.ring)
                for s in range(n):
                    lhs = lhs + g[i, s] * gam[s][j, r]
                    rhs = rhs + g[j, s] * gam[s][i, r]
                assert lhs == rhs


def test_unity_coefficient_tables():
    assert dict(unity_coeffs(3, 1, 0).c) == {1: 1, 2: -4, 3: 4}
    assert dict(unity_coeffs(3, 1, 1).c) == {1: 1, 2: 0, 3: -4}
    assert dict(unity_coeffs(3, 2, 1).c) == {2: 1, 3: 2}


@pytest.mark.parametrize("l,k,m",
                         [(l, k, m) for l in range(1, 4)
                          for k in range(1, l + 1) for m in range(0, l - k + 1)])
def test_unity_shift_is_linear(l, k, m):
    check_pencil_linearity(l, k, m)


def test_tau_chart_small_tables():
    td = tau_chart(3, 1, 0)
    y = td.tau_of_y.new.ring
    e = lambda n: Poly.var(y, E_SYMBOL, 1, n)
    yv = lambda j: Poly.var(y, "y%d" % j)
    assert td.tau_of_y.images["tau1"] == yv(1) + e(6)
    assert td.tau_of_y.images["tau2"] == yv(2) + yv(1).scale(4) + e(12)
    assert td.tau_of_y.images["tau3"] == yv(3) + yv(2).scale(2) + yv(1).scale(4) + e(8)

    td = tau_chart(3, 2, 1)
    y = td.tau_of_y.new.ring
    yv = lambda j: Poly.var(y, "y%d" % j)
    e2 = lambda n: Poly.var(y, E_SYMBOL, 2, n)
    assert td.tau_of_y.images["tau1"] == yv(1) + Poly.var(y, E_SYMBOL, 1, 2)
    assert td.tau_of_y.images["tau2"] == yv(2) + e2(4)
    assert td.tau_of_y.images["tau3"] == \
        yv(3).scale(-1) + yv(2).scale(2) \
        + yv(1) * Poly.var(y, E_SYMBOL, 1, -4) + e2(8)


@pytest.mark.parametrize("l,k,m",
                         [(l, k, m) for l in range(1, 6)
                          for k in range(1, l + 1) for m in range(0, l - k + 1)])
def test_eta_block_form_and_determinant(l, k, m):
    # eta_tau itself hard-asserts the block table and the determinant
    ed = eta_tau(l, k, m)
    # eta must not depend on the unity coordinate
    for i in range(l + 1):
        for j in range(l + 1):
            assert ed.eta[i, j].diff("tau%d" % k).is_zero()
    # weighted homogeneity of the transported metric and symbols
    weights = {("tau%d" % j): min(j, k) for j in range(1, l + 1)}
    weights[E_SYMBOL] = 1
    dpos = [min(j, k) for j in range(1, l + 1)] + [0]
    for i in range(l + 1):
        for j in range(l + 1):
            degs = ed.md.g[i, j].weighted_degrees(weights)
            assert degs <= {dpos[i] + dpos[j]}
            for r in range(l + 1):
                degs = ed.md.gamma[r][i, j].weighted_degrees(weights)
                assert degs <= {dpos[i] + dpos[j] - dpos[r]}


def test_eta_determinant_signs():
    assert str(eta_tau(3, 1, 0).det_eta) == "64*tau3^2"
    assert str(eta_tau(3, 1, 1).det_eta) == "-16*tau2*tau3"
    assert str(eta_tau(3, 2, 1).det_eta) == "-8*tau3"
    # the first case is one where the overall sign is not (-1)^l
    assert eta_tau(3, 1, 0).det_sign != eta_tau(3, 1, 0).det_sign_alternating
    assert eta_tau(3, 1, 1).det_sign == eta_tau(3, 1, 1).det_sign_alternating


def test_eta_corner_block_value():
    # the antidiagonal corner of the first block carries the constant k
    ed = eta_tau(4, 3, 0)
    assert ed.eta[0, 1] == Poly.const(ed.tau.chart.ring, 3)
    assert ed.eta[1, 0] == Poly.const(ed.tau.chart.ring, 3)
    assert ed.eta[2, 4] == Poly.const(ed.tau.chart.ring, 1)


@pytest.mark.parametrize("l,k,m", [(2, 1, 0), (3, 1, 1), (3, 2, 0), (4, 2, 1)])
def test_transport_agrees_along_both_paths(l, k, m):
    # moving theta -> tau -> y stepwise must equal the composite map
    pd = metric_theta(l, k)
    td = tau_chart(l, k, m)
    stepwise = transport(transport(pd.md, td.theta_of_tau), td.tau_of_y)
    composite = transport(pd.md, td.theta_of_tau.then(td.tau_of_y))
    assert stepwise.g == composite.g
    for r in range(l + 1):
        assert stepwise.gamma[r] == composite.gamma[r]
