"""Ring laws, calculus rules, and JSON round-trips for sparse Laurent polynomials."""

import json
import random

import pytest

from weylfrob.laurent import E_SYMBOL, Poly, QQ

VARS = ("t1", "t2", E_SYMBOL)


def random_poly(rng, nterms=4, vars=VARS):
    terms = {}
    for _ in range(nterms):
        exps = tuple(rng.randint(-2, 3) for _ in vars)
        coeff = QQ(rng.randint(-5, 5), rng.randint(1, 4))
        if coeff != 0:
            terms[exps] = terms.get(exps, QQ(0)) + coeff
    p = Poly.zero(vars)
    for exps, c in terms.items():
        if c != 0:
            p = p + Poly.monomial(vars, exps, c)
    return p


def test_product_of_conjugates():
    t1 = Poly.var(VARS, "t1")
    e = Poly.var(VARS, E_SYMBOL)
    prod = (t1 + e) * (t1 - e)
    assert prod == t1 ** 2 - e ** 2


def test_unit_times_inverse_is_one():
    e = Poly.var(VARS, E_SYMBOL)
    assert e.unit_inverse() * e == Poly.const(VARS, 1)


def test_square_of_u_minus_two():
    u = Poly.var(("u",), "u")
    sq = (u - Poly.const(("u",), 2)) ** 2
    assert sq == u ** 2 - u.scale(4) + Poly.const(("u",), 4)


def test_negative_power_of_sum_rejected():
    t1 = Poly.var(VARS, "t1")
    e = Poly.var(VARS, E_SYMBOL)
    with pytest.raises(ValueError):
        (t1 + e) ** (-1)


def test_partial_derivative():
    vars = ("t2", "t3")
    t2 = Poly.var(vars, "t2")
    t3 = Poly.var(vars, "t3")
    p = t2 * t3 + (t3 ** 4).scale(QQ(1, 6))
    assert p.diff("t3") == t2 + (t3 ** 3).scale(QQ(2, 3))


def test_exponential_derivation_rule():
    e2 = Poly.var(VARS, E_SYMBOL, power=2)
    assert e2.dlog() == e2.scale(2)


def test_laurent_derivative():
    vars = ("t2", "t3")
    p = Poly.monomial(vars, (-1, 1), 1)  # t3 / t2
    assert p.diff("t2") == Poly.monomial(vars, (-2, 1), -1)


def test_substitute_linear_shift():
    src = ("y1", E_SYMBOL)
    tgt = ("t1", E_SYMBOL)
    p = Poly.var(src, "y1") + Poly.var(src, E_SYMBOL, coeff=6)
    images = {
        "y1": Poly.var(tgt, "t1") - Poly.var(tgt, E_SYMBOL, coeff=4),
        E_SYMBOL: Poly.var(tgt, E_SYMBOL),
    }
    assert p.substitute(images, tgt) == Poly.var(tgt, "t1") + Poly.var(tgt, E_SYMBOL, coeff=2)


def test_substitute_identity():
    rng = random.Random(5)
    p = random_poly(rng)
    images = {v: Poly.var(VARS, v) for v in VARS}
    assert p.substitute(images, VARS) == p


def test_substitute_negative_power_into_monomial():
    src = ("z3",)
    tgt = ("t3",)
    p = Poly.var(src, "z3", power=-1)
    images = {"z3": Poly.var(tgt, "t3", power=4)}
    assert p.substitute(images, tgt) == Poly.var(tgt, "t3", power=-4)


def test_substitute_negative_power_into_sum_rejected():
    src = ("z3",)
    tgt = ("t3", E_SYMBOL)
    p = Poly.var(src, "z3", power=-1)
    images = {"z3": Poly.var(tgt, "t3") + Poly.var(tgt, E_SYMBOL)}
    with pytest.raises(ValueError):
        p.substitute(images, tgt)


def test_ring_laws_on_random_inputs():
    rng = random.Random(0)
    for _ in range(40):
        p = random_poly(rng)
        q = random_poly(rng)
        r = random_poly(rng)
        assert p + q == q + p
        assert p * q == q * p
        assert (p + q) + r == p + (q + r)
        assert (p * q) * r == p * (q * r)
        assert p * (q + r) == p * q + p * r
        assert p - p == Poly.zero(VARS)


def test_leibniz_rule_on_random_inputs():
    rng = random.Random(1)
    for _ in range(30):
        p = random_poly(rng)
        q = random_poly(rng)
        assert (p * q).diff("t1") == p.diff("t1") * q + p * q.diff("t1")
        assert (p * q).dlog() == p.dlog() * q + p * q.dlog()


def test_derivative_of_unknown_symbol_rejected():
    p = Poly.var(VARS, "t1")
    with pytest.raises(ValueError):
        p.diff("nope")


def test_json_round_trip_bit_exact():
    rng = random.Random(2)
    for _ in range(20):
        p = random_poly(rng)
        s = p.to_json()
        q = Poly.from_json(s)
        assert q == p
        assert q.to_json() == s


def test_json_schema_shape():
    p = Poly.var(VARS, "t1", coeff=QQ(1, 2)) + Poly.var(VARS, E_SYMBOL, power=-2)
    d = json.loads(p.to_json())
    assert set(d) == {"vars", "terms"}
    assert d["vars"] == list(VARS)
    for term in d["terms"]:
        assert set(term) == {"coeff", "exps"}
        assert isinstance(term["coeff"], str)
        assert all(isinstance(x, int) for x in term["exps"])


def test_canonical_term_order_is_graded_lex():
    p = Poly.var(VARS, "t2") + Poly.var(VARS, "t1") + Poly.var(VARS, "t1", power=2)
    exps = [e for e, _ in p.sorted_terms()]
    assert exps == [(2, 0, 0), (1, 0, 0), (0, 1, 0)]
