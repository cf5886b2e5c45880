"""Flat coordinates of the second pencil metric.

Starting from the tau chart, the metric eta is flattened in three
moves.  A polynomial shear z = tau + p (solved degree by degree from
the flatness equations) together with a constant triangular mixing of
the two middle blocks brings eta to a block form whose middle blocks
are Hankel matrices in the z's.  A monomial power substitution then
rewrites those blocks over two distinguished coordinates, and a final
triangular correction makes eta constant.

The intermediate w chart involves fractional powers of the z's, so it
is never materialized on its own: every public map is an exact
Laurent-polynomial parametrization over the t chart, where only
t^{l-m} and t^l are ever inverted.  The degree character deg t^a =
dtilde_a (with deg e^{t^{l+1}} = 1/k) makes all transported data
weighted homogeneous, and the dual pairing i <-> i* fixes which
entries of eta(t) survive.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

from .charts import (LOG, Chart, ChartMap, MetricData, christoffels_covariant,
                     flat_solve, transport)
from .laurent import E_SYMBOL, Poly, QQ, rat
from .linalg import PolyMatrix, invert_unit_jacobian
from .pencil import eta_tau
from .series import series_coeffs


def z_axes(l: int) -> Tuple[str, ...]:
    return tuple("z%d" % i for i in range(1, l + 1)) + (LOG,)


def w_axes(l: int) -> Tuple[str, ...]:
    return tuple("w%d" % i for i in range(1, l + 1)) + (LOG,)


def t_axes(l: int) -> Tuple[str, ...]:
    return tuple("t%d" % i for i in range(1, l + 1)) + (LOG,)


def z_chart(l: int) -> Chart:
    return Chart("z", z_axes(l))


def w_chart(l: int) -> Chart:
    return Chart("w", w_axes(l))


def t_chart(l: int) -> Chart:
    return Chart("t", t_axes(l))


def _check_args(l: int, k: int, m: int) -> None:
    if l < 1 or not (1 <= k <= l) or not (0 <= m <= l - k):
        raise ValueError("need 1 <= k <= l and 0 <= m <= l-k, got l=%d k=%d m=%d"
                         % (l, k, m))


def chart_degrees(l: int, k: int, m: int) -> Tuple[QQ, ...]:
    """Degrees dtilde_1 .. dtilde_{l+1} of the flat coordinates."""
    _check_args(l, k, m)
    nprime = l - k - m
    out: List[QQ] = []
    for j in range(1, k + 1):
        out.append(rat(j) / k)
    for s in range(k + 1, l - m + 1):
        out.append(rat(2 * l - 2 * m - 2 * s + 1) / (2 * nprime))
    for a in range(l - m + 1, l + 1):
        out.append(rat(2 * l - 2 * a + 1) / (2 * m))
    out.append(QQ(0))
    return tuple(out)


def dual_index(l: int, k: int, m: int, i: int) -> int:
    """The involution i -> i* pairing flat coordinates of complementary degree."""
    _check_args(l, k, m)
    if i == k:
        return l + 1
    if i == l + 1:
        return k
    if 1 <= i <= k - 1:
        return k - i
    if k + 1 <= i <= l - m:
        return (k + 1) + (l - m) - i
    if l - m + 1 <= i <= l:
        return (l - m + 1) + l - i
    raise ValueError("index %d out of range for l=%d" % (i, l))


# -- candidate enumeration ---------------------------------------------


def _weighted_monomials(ring: Tuple[str, ...],
                        weighted: Sequence[Tuple[str, int]],
                        target: int) -> List[Poly]:
    """All monomials with the given positive integer weights summing to target."""
    pos = {v: i for i, v in enumerate(ring)}
    out: List[Poly] = []
    expo = [0] * len(ring)

    def rec(i: int, remaining: int) -> None:
        if i == len(weighted):
            if remaining == 0:
                out.append(Poly.monomial(ring, tuple(expo), 1))
            return
        name, wt = weighted[i]
        j = pos[name]
        e = 0
        while e * wt <= remaining:
            expo[j] = e
            rec(i + 1, remaining - e * wt)
            e += 1
        expo[j] = 0

    rec(0, target)
    return out


def _vars_confined(p: Poly, allowed: Sequence[str]) -> bool:
    ok = set(allowed)
    idx = [i for i, v in enumerate(p.vars) if v not in ok]
    return all(all(e[i] == 0 for i in idx) for e in p.terms)


# -- the z chart --------------------------------------------------------


@dataclass
class ZChart:
    """Shear-plus-mixing chart where eta becomes block Hankel."""

    l: int
    k: int
    m: int
    chart: Chart
    tau_of_z: ChartMap
    p: Dict[int, Poly]      # j -> p_j in the tau ring, z^j = tau^j + p_j
    md: MetricData          # first metric g in the z chart
    eta: PolyMatrix         # d g / d z^k, in the normalized block form


def _expected_eta_z(l: int, k: int, m: int, chart: Chart) -> PolyMatrix:
    ring = chart.ring
    n = l + 1
    M = PolyMatrix.zeros(ring, n, n)
    for i in range(1, k):
        M.set(i - 1, k - i - 1, Poly.const(ring, k))
    M.set(k - 1, l, Poly.const(ring, 1))
    M.set(l, k - 1, Poly.const(ring, 1))
    nprime = l - k - m
    for s in range(1, nprime + 1):
        for t in range(1, nprime + 1):
            c = s + t - 1
            if c <= nprime:
                M.set(k + s - 1, k + t - 1,
                      Poly.var(ring, "z%d" % (k + c), 1, 4 * c))
    for r in range(1, m + 1):
        for q in range(1, m + 1):
            c = r + q - 1
            if c <= m:
                M.set(l - m + r - 1, l - m + q - 1,
                      Poly.var(ring, "z%d" % (l - m + c), 1, 4 * c))
    return M


@lru_cache(maxsize=None)
def build_z_chart(l: int, k: int, m: int) -> ZChart:
    """Normalize eta to its block Hankel form by a polynomial change of tau."""
    _check_args(l, k, m)
    ed = eta_tau(l, k, m)
    tch = ed.md.chart
    ring = tch.ring
    gam = christoffels_covariant(tch, ed.eta)

    # Shear of the top block: z^j = tau^j + p_j with p_j built from
    # earlier tau's and E, fixed uniquely by flatness of z^j for eta.
    p: Dict[int, Poly] = {}
    for j in range(1, k + 1):
        f0 = Poly.var(ring, "tau%d" % j)
        weighted = [("tau%d" % i, i) for i in range(1, j)] + [(E_SYMBOL, 1)]
        cands = _weighted_monomials(ring, weighted, j)
        cands = [c for c in cands if not c.is_constant()]
        f, _ = flat_solve(tch, gam, f0, cands)
        p[j] = f - f0
        allowed = ["tau%d" % i for i in range(1, j)] + [E_SYMBOL]
        if not _vars_confined(p[j], allowed):
            raise RuntimeError("p_%d escapes its variable range" % j)

    zch = z_chart(l)
    zring = zch.ring
    imgs: Dict[str, Poly] = {}
    subs = {v: Poly.zero(zring) for v in ring}
    subs[E_SYMBOL] = Poly.var(zring, E_SYMBOL)
    for j in range(1, k + 1):
        img = Poly.var(zring, "z%d" % j) - p[j].substitute(subs, zring)
        imgs["tau%d" % j] = img
        subs["tau%d" % j] = img

    # Constant triangular mixing of the two middle blocks.  The rows of
    # the inverse mixing are the truncated model-series coefficients.
    nprime = l - k - m
    for a in range(1, nprime + 1):
        coeffs = series_coeffs("cosh_sinh", a, nprime - a)
        img = Poly.zero(zring)
        for d, c in enumerate(coeffs):
            img = img + Poly.var(zring, "z%d" % (k + a + d), 1, c)
        imgs["tau%d" % (k + a)] = img
    for a in range(1, m + 1):
        coeffs = series_coeffs("tanh", a, m - a)
        img = Poly.zero(zring)
        for d, c in enumerate(coeffs):
            img = img + Poly.var(zring, "z%d" % (l - m + a + d), 1, c)
        imgs["tau%d" % (l - m + a)] = img

    cmap = ChartMap(tch, zch, imgs)
    md_z = transport(ed.md, cmap)
    eta_z = md_z.g.map(lambda q: q.diff("z%d" % k))
    if eta_z != _expected_eta_z(l, k, m, zch):
        raise RuntimeError("eta in the z chart misses its block Hankel form "
                           "(l=%d k=%d m=%d)" % (l, k, m))
    return ZChart(l, k, m, zch, cmap, p, md_z, eta_z)


# -- the flat chart ------------------------------------------------------


@dataclass
class FlatChart:
    """Exact parametrization of the orbit coordinates by flat coordinates."""

    l: int
    k: int
    m: int
    chart: Chart
    degrees: Tuple[QQ, ...]
    h: Dict[int, Poly]            # triangular corrections, in the w ring
    w_images: Dict[str, Poly]     # w coordinates written in t
    z_images: Dict[str, Poly]     # z coordinates written in t
    tau_of_t: ChartMap
    y_of_t: ChartMap              # the forward map t -> y
    jac: PolyMatrix               # J[a, r] = d y^a / d t^r
    jac_inv: PolyMatrix
    md: MetricData                # first metric g in the t chart
    eta: PolyMatrix               # constant second metric in the t chart


def _expected_eta_t(l: int, k: int, m: int, chart: Chart) -> PolyMatrix:
    ring = chart.ring
    n = l + 1
    M = PolyMatrix.zeros(ring, n, n)

    def put(i: int, j: int, val) -> None:
        M.set(i - 1, j - 1, Poly.const(ring, val))

    for i in range(1, k):
        put(i, k - i, k)
    put(k, l + 1, 1)
    put(l + 1, k, 1)
    nprime = l - k - m
    if nprime == 1:
        put(k + 1, k + 1, 1)
    elif nprime >= 2:
        put(k + 1, l - m, 2)
        put(l - m, k + 1, 2)
        for i in range(k + 2, l - m):
            put(i, l - m + k - i + 1, 4 * nprime)
    if m == 1:
        put(l, l, 1)
    elif m >= 2:
        put(l - m + 1, l, 2)
        put(l, l - m + 1, 2)
        for i in range(l - m + 2, l):
            put(i, 2 * l - m - i + 1, 4 * m)
    return M


def _solve_block(wch: Chart, gam: List[PolyMatrix], start: int, end: int,
                 t_in_w: Dict[str, Poly], h: Dict[int, Poly]) -> None:
    """Flatten one middle block by a triangular correction over its unit."""
    wring = wch.ring
    W = Poly.var(wring, "w%d" % end)
    axes = tuple("w%d" % s for s in range(start, end + 1))
    t_in_w["t%d" % end] = W
    if end == start:
        return
    # Interior variables carry the scaled weight 2*(end - s); the unit
    # itself has weight 1 and the head variable weight 2*(end-start)-1.
    for j in range(start + 1, end):
        weighted = [("w%d" % s, 2 * (end - s)) for s in range(j + 1, end)]
        monos = _weighted_monomials(wring, weighted, 2 * (end - j))
        cands = [W * mono for mono in monos]
        f0 = W * Poly.var(wring, "w%d" % j)
        f, sol = flat_solve(wch, gam, f0, cands, axes=axes)
        hj = Poly.zero(wring)
        for c, mono in zip(sol, monos):
            hj = hj + mono.scale(c)
        h[j] = hj
        t_in_w["t%d" % j] = f
    weighted = [("w%d" % s, 2 * (end - s)) for s in range(start + 1, end)]
    monos = _weighted_monomials(wring, weighted, 2 * (end - start))
    cands = [W * mono for mono in monos]
    f0 = Poly.var(wring, "w%d" % start)
    f, sol = flat_solve(wch, gam, f0, cands, axes=axes)
    hs = Poly.zero(wring)
    for c, mono in zip(sol, monos):
        hs = hs + mono.scale(c)
    h[start] = hs
    t_in_w["t%d" % start] = f


def _invert_block(start: int, end: int, h: Dict[int, Poly],
                  w_in_t: Dict[str, Poly], tring: Tuple[str, ...]) -> None:
    """Triangular back substitution of one block's correction."""
    W = Poly.var(tring, "t%d" % end)
    w_in_t["w%d" % end] = W
    if end == start:
        return
    subs = {v: Poly.zero(tring) for v in h[start].vars}
    subs[E_SYMBOL] = Poly.var(tring, E_SYMBOL)
    subs["w%d" % end] = W
    for j in range(end - 1, start, -1):
        hj = h[j]
        allowed = ["w%d" % s for s in range(j + 1, end)]
        if not _vars_confined(hj, allowed):
            raise RuntimeError("h_%d escapes its variable range" % j)
        img = (Poly.var(tring, "t%d" % j) * Poly.var(tring, "t%d" % end, -1)
               - hj.substitute(subs, tring))
        w_in_t["w%d" % j] = img
        subs["w%d" % j] = img
    hs = h[start]
    if not _vars_confined(hs, ["w%d" % s for s in range(start + 1, end)]):
        raise RuntimeError("h_%d escapes its variable range" % start)
    w_in_t["w%d" % start] = (Poly.var(tring, "t%d" % start)
                             - W * hs.substitute(subs, tring))


@lru_cache(maxsize=None)
def build_flat_chart(l: int, k: int, m: int) -> FlatChart:
    """Flat coordinates of eta as an exact parametrization t -> y."""
    zc = build_z_chart(l, k, m)
    ed = eta_tau(l, k, m)
    nprime = l - k - m

    wch = w_chart(l)
    wring = wch.ring

    # Monomial power substitution: each middle block is rewritten over
    # its last coordinate, which becomes a unit of the ring.
    z_in_w: Dict[str, Poly] = {}
    for i in range(1, k + 1):
        z_in_w["z%d" % i] = Poly.var(wring, "w%d" % i)
    if nprime >= 1:
        z_in_w["z%d" % (l - m)] = Poly.var(wring, "w%d" % (l - m), 2 * nprime)
        if nprime >= 2:
            z_in_w["z%d" % (k + 1)] = (Poly.var(wring, "w%d" % (k + 1))
                                       * Poly.var(wring, "w%d" % (l - m)))
        for s in range(k + 2, l - m):
            z_in_w["z%d" % s] = (Poly.var(wring, "w%d" % s)
                                 * Poly.var(wring, "w%d" % (l - m), 2 * (s - k)))
    if m >= 1:
        z_in_w["z%d" % l] = Poly.var(wring, "w%d" % l, 2 * m)
        if m >= 2:
            z_in_w["z%d" % (l - m + 1)] = (Poly.var(wring, "w%d" % (l - m + 1))
                                           * Poly.var(wring, "w%d" % l))
        for r in range(l - m + 2, l):
            z_in_w["z%d" % r] = (Poly.var(wring, "w%d" % r)
                                 * Poly.var(wring, "w%d" % l, 2 * (r - l + m)))
    cmap_zw = ChartMap(zc.chart, wch, z_in_w)
    md_w = transport(zc.md, cmap_zw)
    eta_w = md_w.g.map(lambda q: q.diff("w%d" % k))

    # Triangular corrections inside each block, solved from flatness.
    gam_w = christoffels_covariant(wch, eta_w)
    t_in_w: Dict[str, Poly] = {}
    for i in range(1, k + 1):
        t_in_w["t%d" % i] = Poly.var(wring, "w%d" % i)
    h: Dict[int, Poly] = {}
    if nprime >= 1:
        _solve_block(wch, gam_w, k + 1, l - m, t_in_w, h)
    if m >= 1:
        _solve_block(wch, gam_w, l - m + 1, l, t_in_w, h)

    tch = t_chart(l)
    tring = tch.ring
    w_in_t: Dict[str, Poly] = {}
    for i in range(1, k + 1):
        w_in_t["w%d" % i] = Poly.var(tring, "t%d" % i)
    if nprime >= 1:
        _invert_block(k + 1, l - m, h, w_in_t, tring)
    if m >= 1:
        _invert_block(l - m + 1, l, h, w_in_t, tring)
    cmap_wt = ChartMap(wch, tch, w_in_t)

    # Round trip: substituting w(t) into t(w) must give the identity.
    back = {v: Poly.zero(tring) for v in wring}
    back.update(w_in_t)
    back[E_SYMBOL] = Poly.var(tring, E_SYMBOL)
    for name, expr in t_in_w.items():
        if expr.substitute(back, tring) != Poly.var(tring, name):
            raise RuntimeError("flat chart fails to invert at %s" % name)

    md_t = transport(md_w, cmap_wt)
    eta_t = md_t.g.map(lambda q: q.diff("t%d" % k))
    if eta_t != _expected_eta_t(l, k, m, tch):
        raise RuntimeError("eta is not in its constant normal form "
                           "(l=%d k=%d m=%d)" % (l, k, m))

    cmap_zt = cmap_zw.then(cmap_wt)
    tau_of_t = zc.tau_of_z.then(cmap_zt)
    y_of_t = ed.tau.y_of_tau.then(tau_of_t)
    jac = y_of_t.jacobian()
    jac_inv = invert_unit_jacobian(jac)

    degrees = chart_degrees(l, k, m)
    weights = {v: QQ(0) for v in tring}
    for a in range(l):
        weights["t%d" % (a + 1)] = degrees[a]
    weights[E_SYMBOL] = rat(1) / k
    for j in range(1, l + 1):
        degs = y_of_t.images["y%d" % j].weighted_degrees(weights)
        if degs != {rat(min(j, k)) / k}:
            raise RuntimeError("y%d is not weighted homogeneous of degree %s"
                               % (j, rat(min(j, k)) / k))

    return FlatChart(l, k, m, tch, degrees, h, w_in_t, cmap_zt.images,
                     tau_of_t, y_of_t, jac, jac_inv, md_t, eta_t)


# -- the flat metrics ----------------------------------------------------


@dataclass
class FlatMetrics:
    """The constant metric eta and the intersection form in flat coordinates."""

    chart: FlatChart
    eta: PolyMatrix
    md: MetricData


def flat_metrics(chart: FlatChart) -> FlatMetrics:
    """Check the closed-form properties of eta(t) and g(t) and bundle them."""
    l, k, m = chart.l, chart.k, chart.m
    d = chart.degrees
    tring = chart.chart.ring
    g = chart.md.g
    eta = chart.eta

    for i in range(l + 1):
        for j in range(l + 1):
            e = eta[i, j]
            if not (e.is_zero() or e.is_constant()):
                raise RuntimeError("eta entry %d,%d is not constant" % (i, j))
            nonzero = not e.is_zero()
            if nonzero != (dual_index(l, k, m, i + 1) == j + 1):
                raise RuntimeError("eta support breaks duality at %d,%d"
                                   % (i, j))
    for i in range(1, l + 2):
        if d[i - 1] + d[dual_index(l, k, m, i) - 1] != 1:
            raise RuntimeError("degrees of %d and its dual do not sum to 1" % i)

    for s in range(1, l + 1):
        if g[s - 1, l] != Poly.var(tring, "t%d" % s, 1, d[s - 1]):
            raise RuntimeError("g^{%d,l+1} is not dtilde_%d t^%d" % (s, s, s))
    if g[l, l] != Poly.const(tring, rat(1) / k):
        raise RuntimeError("g^{l+1,l+1} is not 1/k")
    for r in range(l + 1):
        for i in range(l + 1):
            want = Poly.const(tring, d[r]) if i == r else Poly.zero(tring)
            if chart.md.gamma[r][l, i] != want:
                raise RuntimeError("Gamma^{l+1,%d}_%d has the wrong value"
                                   % (i + 1, r + 1))

    # Weighted homogeneity and confinement of the denominators.
    weights = {v: QQ(0) for v in tring}
    for a in range(l):
        weights["t%d" % (a + 1)] = d[a]
    weights[E_SYMBOL] = rat(1) / k
    allowed_neg = set()
    if l - k - m >= 1:
        allowed_neg.add("t%d" % (l - m))
    if m >= 1:
        allowed_neg.add("t%d" % l)
    neg_ok = [v in allowed_neg for v in tring]
    for i in range(l + 1):
        for j in range(l + 1):
            entry = g[i, j]
            if entry.is_zero():
                continue
            if entry.weighted_degrees(weights) != {d[i] + d[j]}:
                raise RuntimeError("g entry %d,%d is not homogeneous" % (i, j))
            for expo in entry.terms:
                for pos, e in enumerate(expo):
                    if e < 0 and not neg_ok[pos]:
                        raise RuntimeError("g entry %d,%d inverts %s"
                                           % (i, j, tring[pos]))
    return FlatMetrics(chart, eta, chart.md)
