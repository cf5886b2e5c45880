"""Truncated power series for the triangular flat-coordinate constants.

Two families of generating functions appear when the anti-triangular
Hankel blocks of the metric are flattened.  Both are even functions of
the square root of t, so their expansions have exact rational
coefficients and integer powers only:

    cosh_sinh:  f^i(t) = C(t) * S(t)^(2i-1),
                C = sum t^n / (4^n (2n)!),   S = sum t^n / (4^n (2n+1)!)
    tanh:       f^i(t) = T(t)^(2i-1),
                T = (sum t^n/(2n+1)!) / (sum t^n/(2n)!)

A series is just a list of QQ coefficients, index = power of t.
"""

from __future__ import annotations

from typing import List

from .laurent import QQ

KINDS = ("cosh_sinh", "tanh")


def _mul(a: List, b: List, order: int) -> List:
    out = [QQ(0)] * (order + 1)
    for i, ai in enumerate(a):
        if ai == 0 or i > order:
            continue
        for j, bj in enumerate(b):
            if i + j > order:
                break
            out[i + j] += ai * bj
    return out


def _pow(base: List, n: int, order: int) -> List:
    result = [QQ(1)] + [QQ(0)] * order
    b = list(base)
    while n:
        if n & 1:
            result = _mul(result, b, order)
        n >>= 1
        if n:
            b = _mul(b, b, order)
    return result


def _div(num: List, den: List, order: int) -> List:
    if den[0] == 0:
        raise ZeroDivisionError("series division needs a unit constant term")
    out = [QQ(0)] * (order + 1)
    inv0 = 1 / den[0]
    for n in range(order + 1):
        acc = num[n] if n < len(num) else QQ(0)
        for j in range(1, n + 1):
            if j < len(den):
                acc -= den[j] * out[n - j]
        out[n] = acc * inv0
    return out


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def series_coeffs(kind: str, i: int, order: int) -> List:
    """Coefficients [B^i_i, B^i_{i+1}, ..., B^i_{i+order}] as exact rationals."""
    if kind not in KINDS:
        raise ValueError("unknown series kind %r, expected one of %r" % (kind, KINDS))
    if i < 1:
        raise ValueError("index must be >= 1")
    if order < 0:
        raise ValueError("order must be >= 0")
    if kind == "cosh_sinh":
        c = [QQ(1, 4 ** n * _factorial(2 * n)) for n in range(order + 1)]
        s = [QQ(1, 4 ** n * _factorial(2 * n + 1)) for n in range(order + 1)]
        return _mul(c, _pow(s, 2 * i - 1, order), order)
    num = [QQ(1, _factorial(2 * n + 1)) for n in range(order + 1)]
    den = [QQ(1, _factorial(2 * n)) for n in range(order + 1)]
    t = _div(num, den, order)
    return _pow(t, 2 * i - 1, order)


def kappa(kind: str, i: int, j: int):
    """The kappa(i,j) constant the recursion uses for each series family."""
    if kind == "cosh_sinh":
        return QQ(i + j)
    if kind == "tanh":
        return QQ(-4 * (i + j - 1))
    raise ValueError("unknown series kind %r" % kind)
