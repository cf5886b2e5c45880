"""Sparse Laurent polynomials with exact rational coefficients.

A polynomial is stored as a dict mapping exponent tuples to nonzero
rational coefficients.  Exponents may be negative.  Every polynomial
carries the tuple of variable names its exponents refer to; arithmetic
requires both operands to live in the same ring (same names, same
order).

The reserved variable name "_E" denotes the exponential of the last
chart coordinate.  It behaves like an ordinary Laurent variable in all
arithmetic; differentiation along the last coordinate is the weighted
derivation f -> E df/dE, provided by Poly.dlog.
"""

from __future__ import annotations

import json
from typing import Dict, Iterable, Mapping, Tuple

try:
    from gmpy2 import mpq as QQ
except ImportError:  # pragma: no cover
    from fractions import Fraction as QQ

E_SYMBOL = "_E"

Exponent = Tuple[int, ...]


def rat(x) -> "QQ":
    """Coerce an int, string like '3/4', or rational to QQ."""
    return QQ(x) if not isinstance(x, QQ) else x


class Poly:
    __slots__ = ("vars", "terms")

    def __init__(self, vars: Tuple[str, ...], terms: Dict[Exponent, "QQ"]):
        self.vars = tuple(vars)
        self.terms = terms  # owned; never alias a caller's dict without copying

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, vars: Iterable[str]) -> "Poly":
        return cls(tuple(vars), {})

    @classmethod
    def const(cls, vars: Iterable[str], c) -> "Poly":
        vars = tuple(vars)
        c = rat(c)
        if c == 0:
            return cls(vars, {})
        return cls(vars, {(0,) * len(vars): c})

    @classmethod
    def var(cls, vars: Iterable[str], name: str, power: int = 1, coeff=1) -> "Poly":
        vars = tuple(vars)
        i = vars.index(name)
        exp = [0] * len(vars)
        exp[i] = power
        c = rat(coeff)
        if c == 0:
            return cls(vars, {})
        return cls(vars, {tuple(exp): c})

    @classmethod
    def monomial(cls, vars: Iterable[str], exps: Iterable[int], coeff) -> "Poly":
        vars = tuple(vars)
        c = rat(coeff)
        if c == 0:
            return cls(vars, {})
        return cls(vars, {tuple(int(e) for e in exps): c})

    # -- predicates ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        z = (0,) * len(self.vars)
        return all(e == z for e in self.terms)

    def constant_value(self):
        z = (0,) * len(self.vars)
        for e, c in self.terms.items():
            if e != z:
                raise ValueError("not a constant: %s" % self)
        return self.terms.get(z, QQ(0))

    def is_unit_monomial(self) -> bool:
        return len(self.terms) == 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __ne__(self, other) -> bool:
        r = self.__eq__(other)
        return NotImplemented if r is NotImplemented else not r

    def __hash__(self):
        raise TypeError("Poly is mutable-by-convention and unhashable")

    # -- arithmetic ----------------------------------------------------

    def _check(self, other: "Poly"):
        if self.vars != other.vars:
            raise ValueError("variable mismatch: %r vs %r" % (self.vars, other.vars))

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s == 0:
                    del out[e]
                else:
                    out[e] = s
        return Poly(self.vars, out)

    def __sub__(self, other: "Poly") -> "Poly":
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            if s is None:
                out[e] = -c
            else:
                s = s - c
                if s == 0:
                    del out[e]
                else:
                    out[e] = s
        return Poly(self.vars, out)

    def __neg__(self) -> "Poly":
        return Poly(self.vars, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: Dict[Exponent, "QQ"] = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(e)
                if s is None:
                    out[e] = ca * cb
                else:
                    s = s + ca * cb
                    if s == 0:
                        del out[e]
                    else:
                        out[e] = s
        return Poly(self.vars, out)

    def scale(self, c) -> "Poly":
        c = rat(c)
        if c == 0:
            return Poly.zero(self.vars)
        return Poly(self.vars, {e: c * v for e, v in self.terms.items()})

    def add_const(self, c) -> "Poly":
        return self + Poly.const(self.vars, c)

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            return self.unit_inverse() ** (-n)
        result = Poly.const(self.vars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base_needed = n >> 1
            if base_needed:
                base = base * base
            n = base_needed
        return result

    def unit_inverse(self) -> "Poly":
        """Inverse of a single-term polynomial."""
        if len(self.terms) != 1:
            raise ValueError("not a unit monomial, cannot invert: %s" % self)
        ((e, c),) = self.terms.items()
        return Poly(self.vars, {tuple(-x for x in e): 1 / QQ(c)})

    def divide_unit(self, unit: "Poly") -> "Poly":
        return self * unit.unit_inverse()

    # -- calculus ------------------------------------------------------

    def diff(self, name: str) -> "Poly":
        i = self.vars.index(name)
        out: Dict[Exponent, "QQ"] = {}
        for e, c in self.terms.items():
            n = e[i]
            if n == 0:
                continue
            ne = list(e)
            ne[i] = n - 1
            ne = tuple(ne)
            s = out.get(ne)
            if s is None:
                out[ne] = c * n
            else:
                s = s + c * n
                if s == 0:
                    del out[ne]
                else:
                    out[ne] = s
        return Poly(self.vars, out)

    def dlog(self, name: str = E_SYMBOL) -> "Poly":
        """The derivation v d/dv, i.e. multiply each term by its v-exponent."""
        i = self.vars.index(name)
        out = {}
        for e, c in self.terms.items():
            n = e[i]
            if n:
                out[e] = c * n
        return Poly(self.vars, out)

    # -- substitution and evaluation ------------------------------------

    def substitute(self, images: Mapping[str, "Poly"], target_vars: Tuple[str, ...]) -> "Poly":
        """Ring map sending each variable to its image.

        Every variable of self must have an image (images living in the
        ring with variables target_vars).  A variable occurring with a
        negative exponent must map to a unit monomial.
        """
        target_vars = tuple(target_vars)
        imgs = []
        for v in self.vars:
            img = images[v]
            if img.vars != target_vars:
                raise ValueError("image of %s lives in wrong ring" % v)
            imgs.append(img)
        # precompute needed powers per variable
        pows: Dict[Tuple[int, int], Poly] = {}
        out = Poly.zero(target_vars)
        one = Poly.const(target_vars, 1)
        for e, c in self.terms.items():
            term = Poly.const(target_vars, c)
            for i, n in enumerate(e):
                if n == 0:
                    continue
                key = (i, n)
                p = pows.get(key)
                if p is None:
                    p = imgs[i] ** n
                    pows[key] = p
                term = term * p
            out = out + term
        return out

    def rename(self, target_vars: Tuple[str, ...], name_map: Mapping[str, str] | None = None) -> "Poly":
        """Re-embed into a ring with different variable names.

        Variables map by name (or through name_map); new variables are
        allowed, dropped variables must not occur.
        """
        target_vars = tuple(target_vars)
        idx = []
        for v in self.vars:
            w = name_map.get(v, v) if name_map else v
            idx.append(target_vars.index(w) if w in target_vars else -1)
        out: Dict[Exponent, "QQ"] = {}
        for e, c in self.terms.items():
            ne = [0] * len(target_vars)
            for i, n in enumerate(e):
                if n == 0:
                    continue
                if idx[i] < 0:
                    raise ValueError("variable %s lost in rename" % self.vars[i])
                ne[idx[i]] = n
            out[tuple(ne)] = c
        return Poly(target_vars, out)

    def evaluate(self, values: Mapping[str, complex]) -> complex:
        vals = [values[v] for v in self.vars]
        total = 0j
        for e, c in self.terms.items():
            t = complex(float(c))
            for x, n in zip(vals, e):
                if n:
                    t *= x ** n
            total += t
        return total

    def evaluate_exact(self, values: Mapping[str, "QQ"]) -> "QQ":
        """Evaluate at exact rational values (all exponents honored exactly)."""
        vals = [rat(values[v]) for v in self.vars]
        total = QQ(0)
        for e, c in self.terms.items():
            t = c
            for x, n in zip(vals, e):
                if n:
                    t = t * x ** n
            total += t
        return total

    # -- degrees ---------------------------------------------------------

    def weighted_degrees(self, weights: Mapping[str, "QQ"]) -> set:
        w = [rat(weights[v]) for v in self.vars]
        return {sum((wi * n for wi, n in zip(w, e)), QQ(0)) for e in self.terms}

    def coeff_of(self, exps: Iterable[int]) -> "QQ":
        return self.terms.get(tuple(int(e) for e in exps), QQ(0))

    # -- presentation -----------------------------------------------------

    def sorted_terms(self):
        """Terms in descending graded-lex order; the canonical order."""
        return sorted(self.terms.items(), key=lambda ec: (sum(ec[0]), ec[0]), reverse=True)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            for v, n in zip(self.vars, e):
                if n == 1:
                    factors.append(v)
                elif n != 0:
                    factors.append("%s^%d" % (v, n))
            mono = "*".join(factors)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append("%s*%s" % (c, mono))
        s = " + ".join(parts)
        return s.replace("+ -", "- ")

    # -- serialization ----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "vars": list(self.vars),
            "terms": [
                {"coeff": str(c), "exps": list(e)} for e, c in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "Poly":
        vars = tuple(d["vars"])
        terms: Dict[Exponent, "QQ"] = {}
        for t in d["terms"]:
            e = tuple(int(x) for x in t["exps"])
            c = QQ(t["coeff"])
            if c != 0:
                terms[e] = terms.get(e, QQ(0)) + c
        return cls(vars, {e: c for e, c in terms.items() if c != 0})

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, s: str) -> "Poly":
        return cls.from_json_dict(json.loads(s))
