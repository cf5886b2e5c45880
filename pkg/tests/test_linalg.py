"""Exact linear solving and Laurent-matrix inversion."""

import random

import pytest

from weylfrob.laurent import E_SYMBOL, Poly, QQ
from weylfrob.linalg import (LinearInconsistent, PolyMatrix, invert_rational,
                             invert_unit_jacobian, solve_linear)


def test_diagonal_solve():
    x, kernel = solve_linear([[QQ(2), QQ(0)], [QQ(0), QQ(4)]], [QQ(1), QQ(1)])
    assert x == [QQ(1, 2), QQ(1, 4)]
    assert kernel == []


def test_singular_consistent_solve_reports_kernel():
    # x + y = 2 twice: one particular solution plus a one-dimensional kernel
    x, kernel = solve_linear([[QQ(1), QQ(1)], [QQ(1), QQ(1)]], [QQ(2), QQ(2)])
    assert x[0] + x[1] == QQ(2)
    assert len(kernel) == 1
    v = kernel[0]
    assert v[0] + v[1] == QQ(0)
    assert v != [QQ(0), QQ(0)]


def test_inconsistent_solve_raises_with_certificate():
    with pytest.raises(LinearInconsistent):
        solve_linear([[QQ(1), QQ(1)], [QQ(1), QQ(1)]], [QQ(2), QQ(3)])


def test_triangular_recursion_base_constant():
    # 4*B + kappa*1 = 16*B with kappa = 2 resp. -4 fixes the first
    # nontrivial series constant in each family.
    x, _ = solve_linear([[QQ(12)]], [QQ(2)])
    assert x == [QQ(1, 6)]
    x, _ = solve_linear([[QQ(12)]], [QQ(-4)])
    assert x == [QQ(-1, 3)]


def test_rational_matrix_inverse():
    inv = invert_rational([[QQ(2), QQ(1)], [QQ(1), QQ(1)]])
    assert inv == [[QQ(1), QQ(-1)], [QQ(-1), QQ(2)]]


def test_identity_jacobian_inverts_to_identity():
    vars = ("t1", E_SYMBOL)
    ident = PolyMatrix.identity(vars, 3)
    assert invert_unit_jacobian(ident) - ident == PolyMatrix.zeros(vars, 3, 3)


def test_triangular_jacobian_inverse():
    vars = ("t3", E_SYMBOL)
    e = Poly.var(vars, E_SYMBOL)
    t3 = Poly.var(vars, "t3")
    jac = PolyMatrix([[Poly.const(vars, 1), e.scale(2)],
                      [Poly.zero(vars), (t3 ** 3).scale(4)]])
    assert jac.det() == (t3 ** 3).scale(4)
    inv = invert_unit_jacobian(jac)
    assert inv[0, 0] == Poly.const(vars, 1)
    assert inv[0, 1] == Poly.monomial(vars, (-3, 1), QQ(-1, 2))
    assert inv[1, 0] == Poly.zero(vars)
    assert inv[1, 1] == Poly.monomial(vars, (-3, 0), QQ(1, 4))


def test_non_unit_determinant_rejected():
    vars = ("t1", "t2")
    t1 = Poly.var(vars, "t1")
    t2 = Poly.var(vars, "t2")
    one = Poly.const(vars, 1)
    jac = PolyMatrix([[t1, -one], [t2, one]])
    assert jac.det() == t1 + t2
    with pytest.raises(ValueError):
        invert_unit_jacobian(jac)


def test_inverse_times_original_is_identity():
    rng = random.Random(3)
    vars = ("t1", "t2", E_SYMBOL)
    for _ in range(10):
        n = rng.randint(1, 3)
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                if j < i:
                    row.append(Poly.zero(vars))
                elif j == i:
                    exps = tuple(rng.randint(-1, 2) for _ in vars)
                    row.append(Poly.monomial(vars, exps, QQ(rng.choice([1, 2, -1]))))
                else:
                    row.append(random_entry(rng, vars))
            rows.append(row)
        jac = PolyMatrix(rows)
        inv = invert_unit_jacobian(jac)
        prod = inv * jac
        assert prod - PolyMatrix.identity(vars, n) == PolyMatrix.zeros(vars, n, n)


def random_entry(rng, vars):
    p = Poly.zero(vars)
    for _ in range(rng.randint(0, 2)):
        exps = tuple(rng.randint(-1, 2) for _ in vars)
        p = p + Poly.monomial(vars, exps, QQ(rng.randint(-3, 3), rng.randint(1, 2)))
    return p
