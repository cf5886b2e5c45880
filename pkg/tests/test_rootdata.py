"""Tests for the root-system data, invariant bases and the B/D collapse.

The frozen tables here were computed by hand from the defining
expressions: elementary symmetric functions for the polynomial slots,
half-angle products for the spinor slots, and backward differences for
the ambient pairing.  The reduction checks at the bottom are the strong
ones: they compare two independently computed intersection forms as
exact Laurent polynomials on the torus.
"""

import pytest

from weylfrob.laurent import E_SYMBOL, Poly, QQ
from weylfrob.linalg import PolyMatrix
from weylfrob.rootdata import (
    bd_reduction_check,
    bd_to_c_map,
    chevalley_limit_check,
    check_weyl_invariance,
    invariant_basis,
    make_root_data,
    tilde_metric,
)


def test_weight_tables():
    rd = make_root_data("C", 4, 2)
    assert [str(w) for w in rd.weights] == ["1", "2", "2", "2"]
    assert rd.gamma == 1 and rd.cartan_det == 2
    rd = make_root_data("D", 5, 2)
    assert [str(w) for w in rd.weights] == ["1", "2", "2", "1", "1"]
    assert rd.cartan_det == 4
    rd = make_root_data("B", 4, 2)
    assert [str(w) for w in rd.weights] == ["1", "2", "2", "1"]
    rd = make_root_data("B", 3, 3)
    assert [str(w) for w in rd.weights] == ["1/2", "1", "3/4"]
    assert rd.gamma == 2
    rd = make_root_data("D", 5, 4)
    assert [str(w) for w in rd.weights] == ["1/2", "1", "3/2", "5/4", "3/4"]
    rd = make_root_data("D", 5, 5)
    assert [str(w) for w in rd.weights] == ["1/2", "1", "3/2", "3/4", "5/4"]


def test_bad_arguments():
    with pytest.raises(ValueError):
        make_root_data("A", 3, 1)
    with pytest.raises(ValueError):
        make_root_data("C", 1, 1)
    with pytest.raises(ValueError):
        make_root_data("D", 3, 1)
    with pytest.raises(ValueError):
        make_root_data("B", 3, 0)
    with pytest.raises(ValueError):
        make_root_data("B", 3, 4)
    with pytest.raises(ValueError):
        bd_to_c_map("C", 3, 1)
    with pytest.raises(ValueError):
        bd_to_c_map("D", 4, 3)
    with pytest.raises(ValueError):
        bd_to_c_map("D", 4, 4)


def test_invariant_basis_rank_two():
    ib = invariant_basis("C", 2, 1)
    ring = ib.ring
    xi1 = Poly.var(ring, "q1") + Poly.var(ring, "q1", -1)
    xi2 = Poly.var(ring, "q2") + Poly.var(ring, "q2", -1)
    assert ib.y[0] == xi1 + xi2
    assert ib.y[1] == xi1 * xi2

    ib = invariant_basis("B", 2, 1)
    ring = ib.ring
    h1 = Poly.var(ring, "q1") + Poly.var(ring, "q1", -1)
    h2 = Poly.var(ring, "q2") + Poly.var(ring, "q2", -1)
    assert ib.y[1] == h1 * h2
    assert ib.root == 2
    # dressing: weights are (1, 1/2), so the exponents of u are 2 and 1
    assert ib.ytilde[0] == ib.y[0] * Poly.var(ring, "u", 2)
    assert ib.ytilde[1] == ib.y[1] * Poly.var(ring, "u")


def test_invariant_basis_spinor_slots():
    ib = invariant_basis("D", 4, 1)
    ring = ib.ring
    plus = Poly.const(ring, 1)
    minus = Poly.const(ring, 1)
    for a in range(1, 5):
        plus = plus * (Poly.var(ring, "q%d" % a) + Poly.var(ring, "q%d" % a, -1))
        minus = minus * (Poly.var(ring, "q%d" % a) - Poly.var(ring, "q%d" % a, -1))
    assert (ib.y[2] + ib.y[3]) == plus
    assert (ib.y[2] - ib.y[3]) == minus


@pytest.mark.parametrize("family,l,k", [
    ("C", 2, 1), ("C", 3, 2), ("C", 4, 4),
    ("B", 2, 2), ("B", 3, 1), ("B", 4, 3),
    ("D", 4, 1), ("D", 4, 4),
])
def test_weyl_invariance(family, l, k):
    check_weyl_invariance(invariant_basis(family, l, k))


def test_tilde_metric_tables():
    tm = tilde_metric("C", 3, 1)
    want = [[1, 1, 1, 0], [1, 2, 2, 0], [1, 2, 3, 0], [0, 0, 0, -1]]
    for i in range(4):
        for j in range(4):
            assert tm[i, j].constant_value() == want[i][j]
    assert str(tilde_metric("C", 3, 2)[3, 3]) == "-1/2"
    tm = tilde_metric("B", 3, 3)
    assert str(tm[2, 2]) == "3/4" and str(tm[1, 2]) == "1" and str(tm[0, 2]) == "1/2"
    assert str(tm[3, 3]) == "-4/3"
    tm = tilde_metric("D", 4, 1)
    rows = [[str(tm[i, j]) for j in range(5)] for i in range(5)]
    assert rows[0] == ["1", "1", "1/2", "1/2", "0"]
    assert rows[1] == ["1", "2", "1", "1", "0"]
    assert rows[2] == ["1/2", "1", "1", "1/2", "0"]
    assert rows[3] == ["1/2", "1", "1/2", "1", "0"]
    assert rows[4] == ["0", "0", "0", "0", "-1"]
    assert str(tilde_metric("D", 4, 2)[4, 4]) == "-1/2"


@pytest.mark.parametrize("l,k", [(2, 1), (3, 2), (4, 1), (4, 4)])
def test_c_differences_are_orthonormal(l, k):
    # backward differences of the log coordinates diagonalize the pairing
    tm = tilde_metric("C", l, k)
    n = l + 1
    ring = tm.vars
    p = [[Poly.zero(ring) for _ in range(n)] for _ in range(n)]
    for s in range(n):
        p[s][s] = Poly.const(ring, 1)
        if 0 < s < l:
            p[s][s - 1] = Poly.const(ring, -1)
    pm = PolyMatrix(p)
    diag = pm * tm * pm.transpose()
    for i in range(n):
        for j in range(n):
            want = 0
            if i == j:
                want = QQ(-1) / k if i == l else QQ(1)
            assert diag[i, j].constant_value() == want


@pytest.mark.parametrize("family,l,k", [
    ("C", 2, 1), ("C", 3, 3), ("C", 4, 2), ("C", 5, 3),
    ("B", 2, 1), ("B", 2, 2), ("B", 3, 2), ("B", 4, 3), ("B", 4, 4),
    ("D", 4, 1), ("D", 4, 2), ("D", 4, 3), ("D", 4, 4), ("D", 5, 2), ("D", 5, 4),
])
def test_chevalley_limits(family, l, k):
    rep = chevalley_limit_check(family, l, k)
    assert rep.symbolic_ok, (rep.det, rep.expected)
    assert rep.ok and not rep.failures


def test_chevalley_frozen_values():
    assert chevalley_limit_check("C", 3, 1).det == "r1^4"
    assert chevalley_limit_check("C", 3, 3).det == "1"
    rep = chevalley_limit_check("B", 3, 3)
    assert rep.det == "1/2*r3^-1" and rep.note
    assert chevalley_limit_check("D", 5, 2).det == "1/2*r2^4"
    assert chevalley_limit_check("D", 5, 4).det == "-1/2*r5^-2"
    assert chevalley_limit_check("D", 5, 5).det == "1/2*r5^-2"
    assert len(chevalley_limit_check("B", 4, 2, samples=7, seed=3).points) == 7


def test_bd_map_images():
    bm = bd_to_c_map("B", 2, 1)
    assert str(bm.images["y1"]) == "y1"
    assert str(bm.images["y2"]) == "y2^2 - 2*y1 - 4*_E"
    assert bm.beta == 1
    bm = bd_to_c_map("B", 3, 3)
    assert str(bm.images["y3"]) == "-4*y1*_E^2 - 8*_E^3 - 2*y2*_E + y3^2"
    assert bm.beta == QQ(1) / 2
    bm = bd_to_c_map("D", 4, 2)
    assert str(bm.images["y3"]) == "-4*y1*_E + y3*y4"
    assert str(bm.images["y4"]) == "y3^2 + y4^2 - 16*_E^2 - 4*y2"
    assert bm.beta == 1


@pytest.mark.parametrize("family,l,k", [
    ("B", 2, 1), ("B", 2, 2),
    ("B", 3, 1), ("B", 3, 2), ("B", 3, 3),
    ("B", 4, 1), ("B", 4, 2), ("B", 4, 3), ("B", 4, 4),
    ("D", 4, 1), ("D", 4, 2),
])
def test_bd_reduction_equals_c_metric(family, l, k):
    bd_reduction_check(family, l, k)
