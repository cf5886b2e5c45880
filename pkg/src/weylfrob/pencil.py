"""Bihamiltonian pair of metrics on the extended orbit space, C family.

Coordinates.  The orbit space of rank l carries l basic exponential
invariants plus one extra linear coordinate seen only through its
exponential E.  Three charts appear here:

  y chart      axes (y1 .. yl, LOG); yj is the j-th basic invariant
               already dressed with its E power, so it is a genuine
               single-valued coordinate.
  theta chart  axes (th0 .. thl); th0 = E^k is invertible and thj is
               yj times a further E power chosen so that all l+1
               coordinates scale the same way.  The intersection
               metric is polynomial here.
  tau chart    axes (tau1 .. taul, LOG); an invertible linear change
               of the theta coordinates over the ring of E units,
               chosen so that the unity vector field becomes d/d tau^k.

Metric.  Writing P(u) = sum_j th^j u^(l-j), the pairing of the theta
differentials has the generating function

  sum g^{ij} u^(l-i) v^(l-j) = (k-l) P(u) P(v)
      + (u^2-4)/(u-v) P'(u) P(v) - (v^2-4)/(u-v) P(u) P'(v)

and the contravariant Christoffel symbols have the analogous generating
function with one slot turned into a differential.  Both numerators are
exactly divisible by the powers of (u - v), so coefficient extraction
is pure polynomial arithmetic.  An independent chain-rule oracle in the
eigenvalue coordinates q (functions on the maximal torus) certifies the
extraction: see check_mu_metric and check_mu_gamma.

The metric eta = d g / d tau^k obtained in the tau chart is block
diagonal with one block mixing the first k coordinates and LOG and two
anti-triangular Hankel blocks; eta_tau verifies the block entries and
the closed form of det(eta) as hard postconditions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .charts import LOG, Chart, ChartMap, MetricData, transport
from .laurent import E_SYMBOL, Poly, QQ
from .linalg import PolyMatrix, invert_rational


def degrees_c(l: int, k: int) -> List[int]:
    """Weights d_j = min(j, k) of the basic invariants, j = 1 .. l."""
    return [min(j, k) for j in range(1, l + 1)]


def theta_axes(l: int) -> Tuple[str, ...]:
    return tuple("th%d" % j for j in range(l + 1))


def tau_axes(l: int) -> Tuple[str, ...]:
    return tuple("tau%d" % j for j in range(1, l + 1)) + (LOG,)


def y_axes(l: int) -> Tuple[str, ...]:
    return tuple("y%d" % j for j in range(1, l + 1)) + (LOG,)


def theta_chart(l: int) -> Chart:
    return Chart("theta", theta_axes(l))


def tau_chart_axes(l: int) -> Chart:
    return Chart("tau", tau_axes(l))


def y_chart(l: int) -> Chart:
    return Chart("y", y_axes(l))


# -- generating-function extraction -----------------------------------


def _uv_ring(l: int) -> Tuple[str, ...]:
    return ("u", "v") + theta_axes(l)


def build_P(ring: Tuple[str, ...], l: int, uname: str) -> Poly:
    """P(u) = sum_j th^j u^(l-j) in a ring containing u and the thetas."""
    p = Poly.zero(ring)
    for j in range(l + 1):
        p = p + Poly.var(ring, uname, l - j) * Poly.var(ring, "th%d" % j)
    return p


def divide_exact(p: Poly, uname: str, vname: str) -> Poly:
    """Exact division by (u - v); raises if the remainder is nonzero."""
    ring = p.vars
    ui = ring.index(uname)
    by_deg: Dict[int, Dict[Tuple[int, ...], QQ]] = {}
    for e, c in p.terms.items():
        d = e[ui]
        rest = e[:ui] + (0,) + e[ui + 1:]
        by_deg.setdefault(d, {})[rest] = c
    if not by_deg:
        return p
    top = max(by_deg)
    coeffs = {d: Poly(ring, terms) for d, terms in by_deg.items()}
    zero = Poly.zero(ring)
    v = Poly.var(ring, vname)
    quot: Dict[int, Poly] = {}
    carry = coeffs.get(top, zero)
    for d in range(top - 1, -1, -1):
        quot[d] = carry
        carry = coeffs.get(d, zero) + v * carry
    if not carry.is_zero():
        raise ValueError("polynomial is not divisible by (%s - %s)" % (uname, vname))
    out = Poly.zero(ring)
    for d, q in quot.items():
        if not q.is_zero():
            out = out + q * Poly.var(ring, uname, d)
    return out


def _extract_uv_matrix(q: Poly, l: int, target: Tuple[str, ...]) -> PolyMatrix:
    """Read off the u^(l-i) v^(l-j) coefficients into an (l+1)^2 matrix."""
    ring = q.vars
    ui = ring.index("u")
    vi = ring.index("v")
    cells: List[List[Dict[Tuple[int, ...], QQ]]] = [
        [dict() for _ in range(l + 1)] for _ in range(l + 1)]
    for e, c in q.terms.items():
        i = l - e[ui]
        j = l - e[vi]
        if not (0 <= i <= l and 0 <= j <= l):
            raise ValueError("stray generating-function term at degrees %d, %d"
                             % (e[ui], e[vi]))
        rest = e[2:]
        cells[i][j][rest] = cells[i][j].get(rest, QQ(0)) + c
    rows = []
    for i in range(l + 1):
        row = []
        for j in range(l + 1):
            terms = {e: c for e, c in cells[i][j].items() if c != 0}
            row.append(Poly(target, terms))
        rows.append(row)
    return PolyMatrix(rows)


@dataclass
class PencilData:
    """Intersection metric and Christoffel symbols in the theta chart."""

    l: int
    k: int
    chart: Chart
    y_chart: Chart
    theta_of_y: ChartMap
    md: MetricData
    ext_row: List[Poly]   # pairing of d th^i with the bare extra coordinate
    ext_corner: QQ        # its self-pairing, 1/k


@lru_cache(maxsize=None)
def metric_theta(l: int, k: int) -> PencilData:
    """Metric and Christoffel symbols extracted from the generating forms."""
    if not (1 <= k <= l):
        raise ValueError("need 1 <= k <= l, got k=%d l=%d" % (k, l))
    ring = _uv_ring(l)
    u = Poly.var(ring, "u")
    v = Poly.var(ring, "v")
    one = Poly.const(ring, 1)
    Pu = build_P(ring, l, "u")
    Pv = build_P(ring, l, "v")
    dPu = Pu.diff("u")
    dPv = Pv.diff("v")
    u2 = u * u - one.scale(4)
    v2 = v * v - one.scale(4)
    uv = u * v - one.scale(4)
    umv = u - v
    kml = Poly.const(ring, k - l)

    num = kml * Pu * Pv * umv + u2 * dPu * Pv - v2 * Pu * dPv
    quot = divide_exact(num, "u", "v")
    ch = theta_chart(l)
    g = _extract_uv_matrix(quot, l, ch.ring)

    gammas: List[PolyMatrix] = []
    for r in range(l + 1):
        vr = Poly.var(ring, "v", l - r)
        num_r = kml * Pu * vr * umv * umv \
            + umv * (u2 * dPu * vr - v2 * Pu * vr.diff("v")) \
            + uv * (Pv * Poly.var(ring, "u", l - r) - Pu * vr)
        quot_r = divide_exact(divide_exact(num_r, "u", "v"), "u", "v")
        gammas.append(_extract_uv_matrix(quot_r, l, ch.ring))

    # postconditions: symmetry, homogeneity, and the extended row
    th0 = ch.var("th0")
    for i in range(l + 1):
        for j in range(l + 1):
            if g[i, j] != g[j, i]:
                raise RuntimeError("metric extraction lost symmetry at %d,%d" % (i, j))
            for e in g[i, j].terms:
                if sum(e) != 2:
                    raise RuntimeError("metric entry %d,%d is not quadratic" % (i, j))
            for r in range(l + 1):
                for e in gammas[r][i, j].terms:
                    if sum(e) != 1:
                        raise RuntimeError("symbol %d,%d,%d is not linear" % (i, j, r))
        if g[i, 0] != th0 * ch.var("th%d" % i) * Poly.const(ch.ring, k):
            raise RuntimeError("first metric column is not k th0 th^i at i=%d" % i)

    ych = y_chart(l)
    dvec = degrees_c(l, k)
    images = {"th0": Poly.var(ych.ring, E_SYMBOL, k)}
    for j in range(1, l + 1):
        images["th%d" % j] = Poly.var(ych.ring, "y%d" % j) \
            * Poly.var(ych.ring, E_SYMBOL, k - dvec[j - 1])
    theta_of_y = ChartMap(ch, ych, images)

    md = MetricData(ch, g, gammas)
    ext_row = [ch.var("th%d" % i) for i in range(l + 1)]
    return PencilData(l, k, ch, ych, theta_of_y, md, ext_row, QQ(1) / QQ(k))


def christoffel_theta(l: int, k: int) -> List[PolyMatrix]:
    """Contravariant symbols Gamma^{ij}_r in the theta chart."""
    return metric_theta(l, k).md.gamma


# -- independent chain-rule oracle in torus coordinates ----------------


def _q_ring(l: int) -> Tuple[str, ...]:
    return tuple("q%d" % a for a in range(1, l + 1)) + (E_SYMBOL,)


def _sigma_list(xs: Sequence[Poly], ring: Tuple[str, ...]) -> List[Poly]:
    """All elementary symmetric polynomials of xs, degree 0 .. len(xs)."""
    sig = [Poly.const(ring, 1)]
    for x in xs:
        nxt = [sig[0]]
        for j in range(1, len(sig) + 1):
            prev = sig[j] if j < len(sig) else Poly.zero(ring)
            nxt.append(prev + sig[j - 1] * x)
        sig = nxt
    return sig


def theta_in_q(l: int, k: int) -> Tuple[Tuple[str, ...], List[Poly]]:
    """The theta coordinates as Laurent polynomials on the torus."""
    ring = _q_ring(l)
    xs = [Poly.var(ring, "q%d" % a) + Poly.var(ring, "q%d" % a, -1)
          for a in range(1, l + 1)]
    ek = Poly.var(ring, E_SYMBOL, k)
    return ring, [s * ek for s in _sigma_list(xs, ring)]


def check_p_properties(l: int, k: int) -> None:
    """Factorization of P and its two first-order derivative identities."""
    ring = ("u",) + _q_ring(l)
    u = Poly.var(ring, "u")
    xs = [Poly.var(ring, "q%d" % a) + Poly.var(ring, "q%d" % a, -1)
          for a in range(1, l + 1)]
    prod = Poly.var(ring, E_SYMBOL, k)
    for x in xs:
        prod = prod * (u + x)
    _, thetas = theta_in_q(l, k)
    P = Poly.zero(ring)
    for j in range(l + 1):
        P = P + Poly.var(ring, "u", l - j) * thetas[j].rename(ring)
    if P != prod:
        raise RuntimeError("P does not factor through the torus eigenvalues")
    if P.dlog(E_SYMBOL) != P.scale(k):
        raise RuntimeError("P is not E-homogeneous of weight k")
    for a in range(1, l + 1):
        qa = Poly.var(ring, "q%d" % a)
        lhs = (u + xs[a - 1]) * P.dlog("q%d" % a)
        rhs = P * (qa - Poly.var(ring, "q%d" % a, -1))
        if lhs != rhs:
            raise RuntimeError("logarithmic derivative identity fails at a=%d" % a)


def _mu_dirs(l: int):
    """The flat directions: dlog along each q_a, then dlog along E."""
    dirs = [("q%d" % a) for a in range(1, l + 1)]
    return dirs


def check_mu_metric(l: int, k: int) -> None:
    """Chain-rule route to g^{ij} must match the extracted polynomials."""
    pd = metric_theta(l, k)
    ring, thetas = theta_in_q(l, k)
    dirs = _mu_dirs(l)
    dZ = [[z.dlog(d) for d in dirs] for z in thetas]
    dZE = [z.dlog(E_SYMBOL) for z in thetas]
    invk = QQ(1) / QQ(k)
    subs = {"th%d" % j: thetas[j] for j in range(l + 1)}
    for i in range(l + 1):
        for j in range(i, l + 1):
            oracle = Poly.zero(ring)
            for a in range(l):
                oracle = oracle - dZ[i][a] * dZ[j][a]
            oracle = oracle + (dZE[i] * dZE[j]).scale(invk)
            direct = pd.md.g[i, j].substitute(subs, ring)
            if direct != oracle:
                raise RuntimeError("metric mismatch against the torus oracle "
                                   "at i=%d j=%d (l=%d k=%d)" % (i, j, l, k))


def check_mu_gamma(l: int, k: int) -> None:
    """Chain-rule route to the Christoffel symbols, one contraction per
    flat direction."""
    pd = metric_theta(l, k)
    ring, thetas = theta_in_q(l, k)
    dirs = _mu_dirs(l) + [E_SYMBOL]
    subs = {"th%d" % j: thetas[j] for j in range(l + 1)}
    gam_q = [pd.md.gamma[r].map(lambda p: p.substitute(subs, ring))
             for r in range(l + 1)]
    dZ = [[z.dlog(d) for d in dirs] for z in thetas]
    invk = QQ(1) / QQ(k)
    for rp, drp in enumerate(dirs):
        for i in range(l + 1):
            for j in range(l + 1):
                lhs = Poly.zero(ring)
                for r in range(l + 1):
                    w = gam_q[r][i, j]
                    if not w.is_zero():
                        lhs = lhs + w * dZ[r][rp]
                rhs = Poly.zero(ring)
                for a in range(l):
                    rhs = rhs - dZ[i][a] * dZ[j][a].dlog(drp)
                rhs = rhs + (dZ[i][l] * dZ[j][l].dlog(drp)).scale(invk)
                if lhs != rhs:
                    raise RuntimeError(
                        "symbol mismatch against the torus oracle at "
                        "i=%d j=%d direction %s (l=%d k=%d)" % (i, j, drp, l, k))


# -- unity ---------------------------------------------------------------


@dataclass
class UnityData:
    """Coefficients of the unity vector field over the invariant basis."""

    l: int
    k: int
    m: int
    c: Dict[int, QQ]   # keys k .. l

    def component(self, j: int) -> QQ:
        return self.c.get(j, QQ(0))


def _comb(n: int, r: int) -> int:
    if r < 0 or r > n:
        return 0
    return math.comb(n, r)


@lru_cache(maxsize=None)
def unity_coeffs(l: int, k: int, m: int) -> UnityData:
    """Expansion coefficients of (u+2)^m (u-2)^(l-k-m) by powers of u."""
    if not (1 <= k <= l):
        raise ValueError("need 1 <= k <= l, got k=%d l=%d" % (k, l))
    if not (0 <= m <= l - k):
        raise ValueError("need 0 <= m <= l-k, got m=%d" % m)
    ring = ("u",)
    u = Poly.var(ring, "u")
    poly = (u.add_const(2) ** m) * (u.add_const(-2) ** (l - k - m))
    c: Dict[int, QQ] = {}
    for j in range(k, l + 1):
        c[j] = poly.coeff_of((l - j,))
    # closed form of the same coefficients, as a cross-check
    for j in range(k, l + 1):
        acc = 0
        for s in range(0, m + 1):
            acc += (-1) ** (m - s) * _comb(m, s) * _comb(l - k - m, l - j - s)
        closed = QQ((-2) ** (j - k)) * acc
        if c[j] != closed:
            raise RuntimeError("unity coefficient mismatch at j=%d" % j)
    if c[k] != 1:
        raise RuntimeError("leading unity coefficient is not 1")
    _check_root_pair_identity(l, k, c)
    return UnityData(l, k, m, c)


def _check_root_pair_identity(l: int, k: int, c: Dict[int, QQ]) -> None:
    """The unity polynomial must annihilate the metric generating form."""
    ring = ("u", "v")
    P0u = Poly.zero(ring)
    P0v = Poly.zero(ring)
    for j, cj in c.items():
        P0u = P0u + Poly.var(ring, "u", l - j, cj)
        P0v = P0v + Poly.var(ring, "v", l - j, cj)
    u = Poly.var(ring, "u")
    v = Poly.var(ring, "v")
    four = Poly.const(ring, 4)
    expr = (P0u * P0v * (u - v)).scale(k - l) \
        + (u * u - four) * P0u.diff("u") * P0v \
        - (v * v - four) * P0u * P0v.diff("v")
    if not expr.is_zero():
        raise RuntimeError("unity polynomial is not a null direction of the "
                           "metric pencil (l=%d k=%d)" % (l, k))


def check_pencil_linearity(l: int, k: int, m: int) -> None:
    """Shifting theta along the unity direction moves g and Gamma at most
    linearly, which is the flat-pencil criterion."""
    pd = metric_theta(l, k)
    ud = unity_coeffs(l, k, m)
    ring = theta_axes(l) + ("lam",)
    lam = Poly.var(ring, "lam")
    subs = {}
    for j in range(l + 1):
        img = Poly.var(ring, "th%d" % j)
        cj = ud.component(j)
        if cj != 0:
            img = img + lam.scale(cj)
        subs["th%d" % j] = img
    lam_idx = ring.index("lam")

    def lam_degree(p: Poly) -> int:
        return max((e[lam_idx] for e in p.terms), default=0)

    for i in range(l + 1):
        for j in range(l + 1):
            if lam_degree(pd.md.g[i, j].substitute(subs, ring)) > 1:
                raise RuntimeError("metric shift is nonlinear at %d,%d" % (i, j))
            for r in range(l + 1):
                if lam_degree(pd.md.gamma[r][i, j].substitute(subs, ring)) > 1:
                    raise RuntimeError("symbol shift is nonlinear at %d,%d,%d"
                                       % (i, j, r))


# -- tau chart -----------------------------------------------------------


@dataclass
class TauData:
    """Linear change from theta to the chart where unity is d/d tau^k."""

    l: int
    k: int
    m: int
    chart: Chart
    M: List[List[QQ]]       # theta_i = sum_j M[i][j] pi^j, integer entries
    Minv: List[List[QQ]]
    theta_of_tau: ChartMap
    tau_of_y: ChartMap
    y_of_tau: ChartMap
    unity: UnityData


def _multiplier(l: int, k: int, m: int, j: int) -> Poly:
    """The u-polynomial attached to the j-th dressed tau coordinate."""
    ring = ("u",)
    u = Poly.var(ring, "u")
    if j <= l - m:
        return (u.add_const(2) ** m) * (u.add_const(-2) ** (l - m - j))
    return ((u.add_const(2) ** (l - j)) * (u.add_const(-2) ** (j - k - 1))).scale(-1)


@lru_cache(maxsize=None)
def tau_chart(l: int, k: int, m: int) -> TauData:
    """Build the tau chart and its maps to the theta and y charts."""
    pd = metric_theta(l, k)
    ud = unity_coeffs(l, k, m)
    M: List[List[QQ]] = []
    mults = [_multiplier(l, k, m, j) for j in range(l + 1)]
    for i in range(l + 1):
        M.append([mults[j].coeff_of((l - i,)) for j in range(l + 1)])
    # the column attached to tau^k must consist of the unity coefficients,
    # which is what makes unity the k-th coordinate field downstream
    for i in range(l + 1):
        if M[i][k] != ud.component(i):
            raise RuntimeError("unity column mismatch at row %d (l=%d k=%d m=%d)"
                               % (i, l, k, m))
    Minv = invert_rational(M)

    tch = tau_chart_axes(l)
    dvec = [0] + degrees_c(l, k)   # dressing weights, index 0 unused sentinel

    def pi_in_tau(j: int) -> Poly:
        if j == 0:
            return Poly.var(tch.ring, E_SYMBOL, k)
        return Poly.var(tch.ring, "tau%d" % j) * Poly.var(tch.ring, E_SYMBOL, k - dvec[j])

    pis = [pi_in_tau(j) for j in range(l + 1)]
    images = {}
    for i in range(l + 1):
        acc = Poly.zero(tch.ring)
        for j in range(l + 1):
            if M[i][j] != 0:
                acc = acc + pis[j].scale(M[i][j])
        images["th%d" % i] = acc
    theta_of_tau = ChartMap(pd.chart, tch, images)

    ych = pd.y_chart
    th_y = [pd.theta_of_y.images["th%d" % i] for i in range(l + 1)]
    tau_images = {}
    for j in range(1, l + 1):
        acc = Poly.zero(ych.ring)
        for i in range(l + 1):
            if Minv[j][i] != 0:
                acc = acc + th_y[i].scale(Minv[j][i])
        tau_images["tau%d" % j] = acc * Poly.var(ych.ring, E_SYMBOL, dvec[j] - k)
    tau_of_y = ChartMap(tch, ych, tau_images)

    y_images = {}
    for j in range(1, l + 1):
        y_images["y%d" % j] = images["th%d" % j] \
            * Poly.var(tch.ring, E_SYMBOL, dvec[j] - k)
    y_of_tau = ChartMap(ych, tch, y_images)

    # round trip: writing theta through tau and then through y must give
    # the direct theta-of-y images
    composite = theta_of_tau.then(tau_of_y)
    for i in range(l + 1):
        if composite.images["th%d" % i] != pd.theta_of_y.images["th%d" % i]:
            raise RuntimeError("tau chart round trip broke at theta %d" % i)

    return TauData(l, k, m, tch, M, Minv, theta_of_tau, tau_of_y, y_of_tau, ud)


# -- eta in the tau chart --------------------------------------------------


@dataclass
class EtaData:
    """The second metric of the pencil in the tau chart."""

    l: int
    k: int
    m: int
    tau: TauData
    md: MetricData        # first metric g with its symbols, tau chart
    eta: PolyMatrix       # d g / d tau^k
    det_eta: Poly
    det_sign: int         # sign actually carried by det(eta)
    det_sign_alternating: int   # the (-1)^l convention, kept for comparison


def _expected_eta(l: int, k: int, m: int, ch: Chart) -> PolyMatrix:
    """The block form of eta: entries by explicit formula."""
    n = l + 1
    nprime = l - k - m
    ring = ch.ring
    zero = Poly.zero(ring)
    out = [[zero for _ in range(n)] for _ in range(n)]

    def tau(j: int, coeff, epow: int = 0) -> Poly:
        if j == 0:
            return Poly.var(ring, E_SYMBOL, epow, coeff) if epow else Poly.const(ring, coeff)
        mono = Poly.var(ring, "tau%d" % j, 1, coeff)
        if epow:
            mono = mono * Poly.var(ring, E_SYMBOL, epow)
        return mono

    pos = {i: i - 1 for i in range(1, l + 1)}
    pos[l + 1] = l   # the LOG axis

    def put(i: int, j: int, p: Poly) -> None:
        out[pos[i]][pos[j]] = p
        out[pos[j]][pos[i]] = p

    # block mixing coordinates 1..k and LOG
    for i in range(1, k):
        for j in range(i, k):
            s = i + j
            if s == k:
                put(i, j, Poly.const(ring, k))
            elif s > k:
                t = s - k
                put(i, j, tau(t - 1, 4 * (k - t + 1), 1) + tau(t, k - t))
    for i in range(1, k):
        put(i, k, tau(i - 1, 4 * (k - i + 1), 1))
    put(k, k, tau(k - 1, 4, 1))
    put(k, l + 1, Poly.const(ring, 1))
    # first Hankel block, coordinates k+1 .. l-m
    for s in range(1, nprime + 1):
        for t in range(s, nprime + 1):
            r = s + t - 1
            if r <= nprime:
                q = tau(k + r, 4 * r)
                if r < nprime:
                    q = q + tau(k + r + 1, r + 1)
                put(k + s, k + t, q)
    # second Hankel block, coordinates l-m+1 .. l
    for s in range(1, m + 1):
        for t in range(s, m + 1):
            r = s + t - 1
            if r <= m:
                q = tau(l - m + r, 4 * r)
                if r < m:
                    q = q + tau(l - m + r + 1, -4 * r)
                put(l - m + s, l - m + t, q)
    return PolyMatrix(out)


@lru_cache(maxsize=None)
def eta_tau(l: int, k: int, m: int) -> EtaData:
    """Transport the metric to the tau chart and differentiate along unity."""
    pd = metric_theta(l, k)
    td = tau_chart(l, k, m)
    md = transport(pd.md, td.theta_of_tau)
    kname = "tau%d" % k
    eta = md.g.map(lambda p: p.diff(kname))
    expected = _expected_eta(l, k, m, td.chart)
    if eta != expected:
        raise RuntimeError("eta does not match its block form (l=%d k=%d m=%d)"
                           % (l, k, m))
    det = eta.det()
    nprime = l - k - m
    mag = (k ** (k - 1)) * (4 ** (l - k)) * (m ** m if m else 1) \
        * (nprime ** nprime if nprime else 1)
    sign = -(-1) ** (((k - 1) * (k - 2)) // 2
                     + (nprime * (nprime - 1)) // 2
                     + (m * (m - 1)) // 2)
    exps = [0] * len(td.chart.ring)
    if nprime:
        exps[td.chart.ring.index("tau%d" % (l - m))] = nprime
    if m:
        exps[td.chart.ring.index("tau%d" % l)] = m
    want = Poly.monomial(td.chart.ring, exps, QQ(sign * mag))
    if det != want:
        raise RuntimeError("det(eta) deviates from its closed form "
                           "(l=%d k=%d m=%d)" % (l, k, m))
    return EtaData(l, k, m, td, md, eta, det, sign, (-1) ** l)
