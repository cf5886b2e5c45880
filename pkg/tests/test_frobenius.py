import dataclasses

import pytest

from weylfrob.flatcoords import build_flat_chart, flat_metrics, FlatMetrics
from weylfrob.frobenius import (axioms_check, equivalence_report, euler_minus_two,
                                frobenius_data, solve_potential, structure_tensor,
                                wdvv_check)
from weylfrob.charts import MetricData
from weylfrob.laurent import Poly, rat

CASES = [(3, 1, 0), (3, 1, 1), (3, 2, 1), (3, 3, 0),
         (4, 1, 2), (4, 2, 0), (4, 2, 2), (4, 4, 0),
         (5, 2, 1)]


def test_potential_matches_printed_rank_four():
    fd = frobenius_data(3, 1, 1)
    ring = fd.flat.chart.ring
    want = {
        (1, 2, 0, 0): rat("1/2"),
        (1, 0, 2, 0): rat("1/2"),
        (0, 4, 0, 0): rat("-1/48"),
        (0, 0, 4, 0): rat("-1/48"),
        (0, 2, 2, 0): rat("-1/8"),
        (0, 2, 0, 1): rat(1),
        (0, 0, 2, 1): rat(-1),
        (0, 0, 0, 2): rat("1/2"),
    }
    assert fd.potential == Poly(ring, {e: c for e, c in want.items()})
    assert fd.bare_coefficient == rat("1/2")


def test_printed_coefficients_spot_values():
    fd = frobenius_data(3, 1, 0)
    assert fd.potential.coeff_of((0, 0, 8, 0)) == rat("-1/36288")
    assert fd.potential.coeff_of((0, 3, -1, 0)) == rat("1/48")

    fd = frobenius_data(4, 2, 0)
    assert fd.potential.coeff_of((0, 0, 3, -1, 0)) == rat("1/48")
    assert fd.potential.coeff_of((0, 0, 0, 0, 4)) == rat("1/4")


@pytest.mark.parametrize("l,k,m", CASES)
def test_potential_shape(l, k, m):
    fd = frobenius_data(l, k, m)
    ring = fd.flat.chart.ring
    tk = "t%d" % k
    # the t^k derivative of the ring part is the eta pairing quadric,
    # so the remainder G never mentions t^k
    cross = fd.potential.diff(tk)
    g_part = fd.potential - Poly.var(ring, tk) * cross
    assert g_part.diff(tk).is_zero()
    weights = {v: rat(0) for v in ring}
    for a in range(l):
        weights["t%d" % (a + 1)] = fd.flat.degrees[a]
    weights["_E"] = rat(1) / k
    assert fd.potential.weighted_degrees(weights) == {rat(2)}


def test_euler_field_frozen():
    fd = frobenius_data(3, 2, 1)
    assert fd.euler == (rat("1/2"), rat(1), rat("1/2"), rat("1/2"))

    fd = frobenius_data(3, 1, 0)
    ring = fd.flat.chart.ring
    assert euler_minus_two(fd) == Poly.var(ring, "t1", 2, rat("1/2"))


@pytest.mark.parametrize("l,k,m", CASES)
def test_unity_structure_constants(l, k, m):
    fd = frobenius_data(l, k, m)
    n = l + 1
    for i in range(n):
        for j in range(n):
            assert fd.c[k - 1][i, j] == fd.metrics.eta[i, j]


@pytest.mark.parametrize("l,k,m", CASES)
def test_wdvv_full(l, k, m):
    report = wdvv_check(frobenius_data(l, k, m))
    assert report.ok
    assert report.quadruples_checked == (l + 1) ** 4
    assert report.max_terms >= 1


def test_wdvv_rank_two_vacuous():
    report = wdvv_check(frobenius_data(1, 1, 0))
    assert report.ok
    assert report.quadruples_checked == 16


def test_wdvv_canary_detects_perturbation():
    fd = frobenius_data(4, 2, 0)
    exps, _ = next(iter(fd.potential.sorted_terms()))
    bumped = fd.potential + Poly.monomial(fd.potential.vars, exps, 1)
    c2 = structure_tensor(fd.flat, fd.metrics.eta, bumped)
    fd2 = dataclasses.replace(fd, potential=bumped, c=c2)
    report = wdvv_check(fd2)
    assert not report.ok
    assert report.failures


def test_wdvv_sampled_large_rank():
    report = wdvv_check(frobenius_data(6, 1, 2), samples=40, seed=11)
    assert report.ok
    assert report.quadruples_checked == 40


@pytest.mark.parametrize("l,k,m", CASES)
def test_axioms(l, k, m):
    report = axioms_check(frobenius_data(l, k, m))
    assert report.ok, report.failed()


def test_equivalence_reports():
    rep = equivalence_report(3, 1, 0)
    assert rep.partner_m == 2
    assert rep.degrees_equal and rep.signature_equal
    assert not rep.self_dual

    rep = equivalence_report(3, 1, 1)
    assert rep.self_dual and rep.consistent

    rep = equivalence_report(4, 1, 1)
    assert rep.partner_m == 2
    assert rep.signature_equal
    assert rep.signature == rep.partner_signature


def test_resolve_is_canonical():
    first = frobenius_data(3, 2, 0)
    chart = build_flat_chart.__wrapped__(3, 2, 0)
    fm = flat_metrics(chart)
    # feed the solver the same metric with every term dict reordered
    remap = lambda p: Poly(p.vars, dict(reversed(list(p.terms.items()))))
    md = MetricData(fm.md.chart, fm.md.g.map(remap),
                    [g.map(remap) for g in fm.md.gamma])
    fm2 = FlatMetrics(chart=fm.chart, eta=fm.eta.map(remap), md=md)
    second = solve_potential(fm2, chart)
    assert second.potential == first.potential
    assert list(second.potential.sorted_terms()) == \
        list(first.potential.sorted_terms())
    assert second.euler == first.euler
