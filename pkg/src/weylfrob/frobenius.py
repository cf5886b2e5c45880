"""The Frobenius potential and its defining identities.

In flat coordinates the intersection form g determines the potential F
through its contravariant Hessian: every monomial of g^{ij} is an
eigenvector of the Euler operator with eigenvalue dtilde_i + dtilde_j,
so F^{ij} is recovered by dividing each monomial by its eigenvalue.
The corner slot (l+1, l+1) has eigenvalue zero and integrates to the
bare coordinate t^{l+1} instead; lowering indices places that bare
occurrence in the (k, k) slot of the covariant Hessian and nowhere
else.  Two more Euler inversions (gradient, then potential) finish the
construction, so no integration constants ever appear: the quadratic
ambiguity of F is fixed to zero by the eigenvalue division itself.

The potential therefore splits as

    F = 1/2 (t^k)^2 t^{l+1} + Fring

where Fring is a Laurent polynomial in the flat coordinates, their two
distinguished inverses and E = e^{t^{l+1}}.  Only the first term ever
mentions t^{l+1} outside the exponential, so FrobeniusData stores the
pair (bare coefficient, ring part) rather than a mixed expression.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .charts import LOG, Chart
from .flatcoords import (FlatChart, FlatMetrics, build_flat_chart,
                         dual_index, flat_metrics)
from .laurent import E_SYMBOL, Poly, QQ, rat
from .linalg import PolyMatrix


@dataclass
class FrobeniusData:
    """Potential, Euler data and structure constants in flat coordinates."""

    l: int
    k: int
    m: int
    flat: FlatChart
    metrics: FlatMetrics
    potential: Poly               # ring part of F
    bare_coefficient: QQ          # multiplies (t^k)^2 t^{l+1}
    euler: Tuple[QQ, ...]         # dtilde_1 .. dtilde_l, then the 1/k drift
    hessian: PolyMatrix           # covariant Hessian; (k,k) holds only its ring part
    c: List[PolyMatrix]           # c[r][i, j] = c^{ij}_r = d F^{ij} / d t^r


def euler_apply(chart: Chart, degrees: Sequence[QQ], k: int, p: Poly) -> Poly:
    """Apply the Euler operator sum dtilde_a t^a d_a + (1/k) d_{l+1}."""
    out = Poly.zero(chart.ring)
    for a, ax in enumerate(chart.axes):
        if ax == LOG:
            out = out + chart.axis_diff(p, ax).scale(rat(1) / k)
        else:
            out = out + (Poly.var(chart.ring, ax) * p.diff(ax)).scale(degrees[a])
    return out


def _scale_monomials_by_inverse_degree(p: Poly, weights: Dict[str, QQ],
                                       expect: QQ, where: str) -> Poly:
    """Divide each monomial by its Euler eigenvalue, auditing homogeneity."""
    terms = {}
    w = [weights[v] for v in p.vars]
    for e, c in p.terms.items():
        deg = sum((wi * n for wi, n in zip(w, e)), QQ(0))
        if deg != expect:
            raise RuntimeError("monomial of degree %s found where %s expects %s"
                               % (deg, where, expect))
        terms[e] = c / deg
    return Poly(p.vars, terms)


@lru_cache(maxsize=None)
def _solve_case(l: int, k: int, m: int) -> FrobeniusData:
    fm = flat_metrics(build_flat_chart(l, k, m))
    return solve_potential(fm, fm.chart)


def frobenius_data(l: int, k: int, m: int) -> FrobeniusData:
    """Construct the Frobenius structure for one case, cached."""
    return _solve_case(l, k, m)


def solve_potential(metrics: FlatMetrics, chart: FlatChart) -> FrobeniusData:
    """Recover the potential from the intersection form by Euler division."""
    if metrics.chart is not chart:
        raise ValueError("metrics and chart belong to different constructions")
    l, k, m = chart.l, chart.k, chart.m
    ch = chart.chart
    ring = ch.ring
    d = list(chart.degrees)
    weights = {v: QQ(0) for v in ring}
    for a in range(l):
        weights["t%d" % (a + 1)] = d[a]
    weights[E_SYMBOL] = rat(1) / k

    # Contravariant Hessian of F.  The corner has Euler eigenvalue zero
    # and equals the bare t^{l+1}; it is kept out of the ring data.
    n = l + 1
    fupper = PolyMatrix.zeros(ring, n, n)
    for i in range(n):
        for j in range(n):
            if i == n - 1 and j == n - 1:
                continue
            gij = metrics.md.g[i, j]
            if gij.is_zero():
                continue
            fupper.set(i, j, _scale_monomials_by_inverse_degree(
                gij, weights, d[i] + d[j], "F^{%d,%d}" % (i + 1, j + 1)))

    # Lower both indices with eta, whose only nonzero entries pair each
    # axis with its dual.
    pair_val = []
    for i in range(1, n + 1):
        pv = metrics.eta[i - 1, dual_index(l, k, m, i) - 1].constant_value()
        pair_val.append(pv)
    hess = PolyMatrix.zeros(ring, n, n)
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            ia, ib = dual_index(l, k, m, a), dual_index(l, k, m, b)
            hess.set(a - 1, b - 1,
                     fupper[ia - 1, ib - 1].scale(
                         1 / (pair_val[a - 1] * pair_val[b - 1])))

    # The bare corner lowers into the (k,k) slot: t^{l+1} itself, since
    # eta^{k,l+1} = 1 and phi = 0.  Remove the shear contributions of
    # the bare term from the ring Hessian before integrating.
    tk = Poly.var(ring, "t%d" % k)
    if hess[k - 1, l] != tk or hess[l, k - 1] != tk:
        raise RuntimeError("Hessian slot (k, l+1) is not t^k")
    hess.set(k - 1, l, Poly.zero(ring))
    hess.set(l, k - 1, Poly.zero(ring))
    if not hess[k - 1, k - 1].is_zero():
        raise RuntimeError("a bare t^{l+1} contribution escaped the (k,k) slot")

    for a in range(n):
        for b in range(a + 1, n):
            if hess[a, b] != hess[b, a]:
                raise RuntimeError("Hessian is not symmetric at %d,%d" % (a, b))
    for a in range(n):
        for b in range(a, n):
            for c_ax in range(b + 1, n):
                left = ch.axis_diff(hess[a, b], ch.axes[c_ax])
                right = ch.axis_diff(hess[a, c_ax], ch.axes[b])
                if left != right:
                    raise RuntimeError("Hessian is not closed at %d,%d,%d"
                                       % (a, b, c_ax))

    # Gradient by one Euler inversion, potential by another.
    grad: List[Poly] = []
    for a in range(n):
        ra = Poly.zero(ring)
        for b, ax in enumerate(ch.axes):
            hab = hess[a, b]
            if hab.is_zero():
                continue
            if ax == LOG:
                ra = ra + hab.scale(rat(1) / k)
            else:
                ra = ra + (Poly.var(ring, ax) * hab).scale(d[b])
        if ra.is_zero():
            grad.append(ra)
            continue
        grad.append(_scale_monomials_by_inverse_degree(
            ra, weights, 2 - d[a], "gradient slot %d" % (a + 1)))
    s = Poly.zero(ring)
    for a, ax in enumerate(ch.axes):
        if ax == LOG:
            s = s + grad[a].scale(rat(1) / k)
        else:
            s = s + (Poly.var(ring, ax) * grad[a]).scale(d[a])
    fring = _scale_monomials_by_inverse_degree(s, weights, QQ(2),
                                               "the potential")

    # Check the double integration against the ring Hessian.
    for a, ax_a in enumerate(ch.axes):
        da = ch.axis_diff(fring, ax_a)
        for b, ax_b in enumerate(ch.axes):
            if ch.axis_diff(da, ax_b) != hess[a, b]:
                raise RuntimeError("recovered potential misses Hessian slot "
                                   "%d,%d" % (a + 1, b + 1))

    # Shape of the t^k dependence: the cross terms pair every non-unity
    # axis with its dual, and the rest of F never sees t^k.
    cross = Poly.zero(ring)
    for i in range(1, n + 1):
        if i == k or i == l + 1:
            continue
        j = dual_index(l, k, m, i)
        if j == i:
            cross = cross + Poly.monomial(
                ring, _exps(ring, {("t%d" % i): 2}), 1 / pair_val[i - 1])
        elif i < j:
            cross = cross + Poly.monomial(
                ring, _exps(ring, {("t%d" % i): 1, ("t%d" % j): 1}),
                2 / pair_val[i - 1])
    cross = cross.scale(rat(1) / 2)
    if fring.diff("t%d" % k) != cross:
        raise RuntimeError("t^k dependence of the potential is not the "
                           "eta pairing quadric")

    c_up = structure_tensor(chart, metrics.eta, fring)

    # Restore the ring Hessian entries that the bare term supplies.
    hess.set(k - 1, l, tk)
    hess.set(l, k - 1, tk)

    euler = tuple(d[:l]) + (rat(1) / k,)
    return FrobeniusData(l, k, m, chart, metrics, fring, rat(1) / 2,
                         euler, hess, c_up)


def structure_tensor(chart: FlatChart, eta: PolyMatrix,
                     fring: Poly) -> List[PolyMatrix]:
    """Raised third derivatives c^{ij}_r of a potential given by ring part.

    The fixed bare term 1/2 (t^k)^2 t^{l+1} is accounted for implicitly:
    it contributes the constant 1 at every permutation of (k, k, l+1).
    """
    l, k, m = chart.l, chart.k, chart.m
    ch = chart.chart
    ring = ch.ring
    n = l + 1
    pair_val = [eta[i, dual_index(l, k, m, i + 1) - 1].constant_value()
                for i in range(n)]
    grads = [ch.axis_diff(fring, ax) for ax in ch.axes]
    c_low = [PolyMatrix.zeros(ring, n, n) for _ in range(n)]
    bare_trip = sorted((k - 1, k - 1, l))
    for a in range(n):
        for b in range(a, n):
            hab = ch.axis_diff(grads[a], ch.axes[b])
            for r in range(n):
                val = ch.axis_diff(hab, ch.axes[r])
                if sorted((a, b, r)) == bare_trip:
                    val = val + Poly.const(ring, 1)
                c_low[r].set(a, b, val)
                c_low[r].set(b, a, val)
    c_up = [PolyMatrix.zeros(ring, n, n) for _ in range(n)]
    for r in range(n):
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                ia, ib = dual_index(l, k, m, i), dual_index(l, k, m, j)
                c_up[r].set(i - 1, j - 1,
                            c_low[r][ia - 1, ib - 1].scale(
                                pair_val[i - 1] * pair_val[j - 1]))
    return c_up


def _exps(ring: Tuple[str, ...], powers: Dict[str, int]) -> Tuple[int, ...]:
    pos = {v: i for i, v in enumerate(ring)}
    out = [0] * len(ring)
    for name, e in powers.items():
        out[pos[name]] = e
    return tuple(out)


def euler_minus_two(data: FrobeniusData) -> Poly:
    """L_E F - 2F, which must be the pure quadratic (t^k)^2 / (2k)."""
    ch = data.flat.chart
    d = data.flat.degrees
    out = euler_apply(ch, d, data.k, data.potential) - data.potential.scale(2)
    # the bare term contributes (t^k)^2 / (2k)
    extra = Poly.var(ch.ring, "t%d" % data.k, 2,
                     data.bare_coefficient / data.k)
    return out + extra


# -- reports -------------------------------------------------------------


@dataclass
class WdvvReport:
    l: int
    k: int
    m: int
    quadruples_checked: int
    failures: List[Tuple[int, int, int, int]]
    max_terms: int

    @property
    def ok(self) -> bool:
        return not self.failures


def wdvv_check(data: FrobeniusData, samples: Optional[int] = None,
               seed: int = 0) -> WdvvReport:
    """Associativity as exact polynomial identities on index quadruples.

    With samples=None every quadruple (i, j, p, q) is checked; otherwise
    a seeded pseudorandom sample of that many quadruples is used.
    """
    n = data.l + 1
    c = data.c
    if samples is None:
        quads = [(i, j, p, q) for i, j, p, q in
                 itertools.product(range(n), repeat=4)]
    else:
        rng = random.Random(seed)
        quads = [tuple(rng.randrange(n) for _ in range(4))
                 for _ in range(samples)]
    failures: List[Tuple[int, int, int, int]] = []
    max_terms = 0
    for (i, j, p, q) in quads:
        left = Poly.zero(data.flat.chart.ring)
        right = Poly.zero(data.flat.chart.ring)
        for mm in range(n):
            left = left + c[mm][i, j] * c[q][mm, p]
            right = right + c[mm][i, p] * c[q][mm, j]
        max_terms = max(max_terms, len(left.terms), len(right.terms))
        if left != right:
            failures.append((i + 1, j + 1, p + 1, q + 1))
    return WdvvReport(data.l, data.k, data.m, len(quads), failures, max_terms)


@dataclass
class AxiomsReport:
    l: int
    k: int
    m: int
    results: List[Tuple[str, bool]]

    @property
    def ok(self) -> bool:
        return all(okay for _, okay in self.results)

    def failed(self) -> List[str]:
        return [name for name, okay in self.results if not okay]


def axioms_check(data: FrobeniusData) -> AxiomsReport:
    """Unity, Euler, intersection-form and symbol identities for one case."""
    l, k, m = data.l, data.k, data.m
    ch = data.flat.chart
    ring = ch.ring
    n = l + 1
    d = data.flat.degrees
    results: List[Tuple[str, bool]] = []

    # unity: the structure constants along t^k reduce to eta
    ok = all(data.c[k - 1][i, j] == data.metrics.eta[i, j]
             for i in range(n) for j in range(n))
    results.append(("unity third derivatives equal eta", ok))

    quad = euler_minus_two(data)
    want = Poly.var(ring, "t%d" % k, 2, rat(1) / (2 * k))
    results.append(("L_E F - 2F is the fixed quadratic", quad == want))

    ok = True
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            gij = data.metrics.md.g[i - 1, j - 1]
            if i == n and j == n:
                # F^{l+1,l+1} = t^{l+1} and the Euler drift is 1/k
                ok = ok and gij == Poly.const(ring, rat(1) / k)
                continue
            ia, ib = dual_index(l, k, m, i), dual_index(l, k, m, j)
            pa = data.metrics.eta[i - 1, ia - 1].constant_value()
            pb = data.metrics.eta[j - 1, ib - 1].constant_value()
            fij = data.hessian[ia - 1, ib - 1].scale(pa * pb)
            if euler_apply(ch, d, k, fij) != gij:
                ok = False
    results.append(("g is the Euler derivative of the Hessian", ok))

    ok = True
    for r in range(n):
        for i in range(n):
            for j in range(n):
                want_g = data.c[r][i, j].scale(d[j])
                if data.metrics.md.gamma[r][i, j] != want_g:
                    ok = False
    results.append(("symbols are degree-scaled structure constants", ok))

    ok = all(data.metrics.md.gamma[r][l, i] ==
             (Poly.const(ring, d[r]) if i == r else Poly.zero(ring))
             for r in range(n) for i in range(n))
    results.append(("unity row of the symbols is diagonal", ok))

    results.append(("unity direction has degree one", d[k - 1] == QQ(1)))

    ok = True
    for i in range(1, n + 1):
        j = dual_index(l, k, m, i)
        ok = ok and d[i - 1] + d[j - 1] == 1
        ok = ok and not data.metrics.eta[i - 1, j - 1].is_zero()
    results.append(("duality pairing of degrees and eta support", ok))
    return AxiomsReport(l, k, m, results)


def _weight_map(data: FrobeniusData) -> Dict[str, QQ]:
    ring = data.flat.chart.ring
    weights = {v: QQ(0) for v in ring}
    for a in range(data.l):
        weights["t%d" % (a + 1)] = data.flat.degrees[a]
    weights[E_SYMBOL] = rat(1) / data.k
    return weights


def eta_signature(eta: PolyMatrix, l: int, k: int, m: int) -> Tuple[int, int]:
    """Exact inertia of the constant metric from its pairing structure."""
    plus = minus = 0
    for i in range(1, l + 2):
        j = dual_index(l, k, m, i)
        if j == i:
            v = eta[i - 1, i - 1].constant_value()
            if v > 0:
                plus += 1
            else:
                minus += 1
        elif i < j:
            plus += 1
            minus += 1
    return plus, minus


@dataclass
class EquivalenceReport:
    l: int
    k: int
    m: int
    partner_m: int
    self_dual: bool
    degrees_equal: bool
    signature_equal: bool
    f_profile_equal: bool
    signature: Tuple[int, int]
    partner_signature: Tuple[int, int]

    @property
    def consistent(self) -> bool:
        return self.degrees_equal and self.signature_equal


def _f_profile(data: FrobeniusData) -> Tuple[Tuple[int, int], ...]:
    """Multiset of (total t-exponent, E-exponent) over the ring monomials."""
    ring = data.flat.chart.ring
    epos = ring.index(E_SYMBOL)
    prof = []
    for e in data.potential.terms:
        tdeg = sum(x for i, x in enumerate(e) if i != epos)
        prof.append((tdeg, e[epos]))
    return tuple(sorted(prof))


def equivalence_report(l: int, k: int, m: int) -> EquivalenceReport:
    """Structural evidence that the cases m and l-k-m are equivalent."""
    partner = l - k - m
    a = frobenius_data(l, k, m)
    b = frobenius_data(l, k, partner)
    da = tuple(sorted(a.flat.degrees))
    db = tuple(sorted(b.flat.degrees))
    sa = eta_signature(a.metrics.eta, l, k, m)
    sb = eta_signature(b.metrics.eta, l, k, partner)
    return EquivalenceReport(
        l, k, m, partner,
        self_dual=(partner == m),
        degrees_equal=(da == db),
        signature_equal=(sa == sb),
        f_profile_equal=(_f_profile(a) == _f_profile(b)),
        signature=sa,
        partner_signature=sb,
    )
