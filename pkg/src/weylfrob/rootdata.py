"""Root-system data for the B, C, D families and their invariant bases.

Representation.  Points of the maximal torus are encoded by unit
variables: for the C family q_a stands for the exponential of the a-th
difference coordinate, while for B and D the variables are half-angle
units (their squares are the full-angle exponentials), which keeps the
spinor-type invariants polynomial.  A further unit u encodes the
exponential of the extra coordinate: u**root equals the exponential of
the full extra log coordinate, where root is chosen so that every
dressed generator y_j * u**(root*d_j) has integer exponents.

The ambient pairing is carried in two normalizations: tilde_metric
returns the rational matrix with the 4 pi^2 factors stripped (positive
on the orbit directions, negative on the extra one), which is the form
printed with the root data; the actual intersection-form computations
use the equivalent statement that differentiation along the Euclidean
torus directions is orthonormal with overall sign -1 and the extra
direction contributes +1/d_k.

bd_to_c_map gives the change of dressed coordinates under which the B
and D intersection forms become the C one; bd_reduction_check verifies
that equality exactly, as Laurent polynomials on the torus.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Tuple

from .charts import transport
from .laurent import E_SYMBOL, Poly, QQ, rat
from .linalg import PolyMatrix
from .pencil import metric_theta

FAMILIES = ("B", "C", "D")


@dataclass(frozen=True)
class RootSystemData:
    family: str
    l: int
    k: int
    weights: Tuple[QQ, ...]   # d_1 .. d_l
    gamma: QQ
    cartan_det: int


def make_root_data(family: str, l: int, k: int) -> RootSystemData:
    if family not in FAMILIES:
        raise ValueError("family must be one of %s, got %r" % (", ".join(FAMILIES), family))
    min_l = 4 if family == "D" else 2
    if l < min_l:
        raise ValueError("family %s needs rank at least %d, got %d" % (family, min_l, l))
    if not (1 <= k <= l):
        raise ValueError("marked vertex k must satisfy 1 <= k <= l, got %d" % k)
    half = QQ(1) / 2
    quarter = QQ(1) / 4
    if family == "C":
        d = [QQ(min(j, k)) for j in range(1, l + 1)]
        gamma = QQ(1)
        f = 2
    elif family == "B":
        if k < l:
            d = [QQ(j) for j in range(1, k + 1)] + [QQ(k)] * (l - 1 - k) + [QQ(k) * half]
            gamma = QQ(1)
        else:
            d = [QQ(j) * half for j in range(1, l)] + [QQ(l) * quarter]
            gamma = QQ(2)
        f = 2
    else:
        if k <= l - 2:
            d = [QQ(j) for j in range(1, k + 1)] + [QQ(k)] * (l - 2 - k) \
                + [QQ(k) * half, QQ(k) * half]
        elif k == l - 1:
            d = [QQ(j) * half for j in range(1, l - 1)] \
                + [QQ(l) * quarter, QQ(l - 2) * quarter]
        else:
            d = [QQ(j) * half for j in range(1, l - 1)] \
                + [QQ(l - 2) * quarter, QQ(l) * quarter]
        gamma = QQ(1)
        f = 4
    if family == "C" and d[k - 1] != k:
        raise RuntimeError("weight table broken: d_k != k for family C")
    if any(w <= 0 for w in d):
        raise RuntimeError("weight table broken: nonpositive weight")
    return RootSystemData(family, l, k, tuple(d), gamma, f)


# -- invariant bases ----------------------------------------------------


@dataclass
class InvariantBasis:
    data: RootSystemData
    ring: Tuple[str, ...]     # unit variables plus the exponential root u
    qvars: Tuple[str, ...]
    half_angle: bool
    root: int                 # u**root = exponential of the extra coordinate
    xi: List[Poly]
    y: List[Poly]             # undressed invariants
    ytilde: List[Poly]        # dressed: y_j * u**(root * d_j)


def _elementary_symmetric(xs: List[Poly], ring: Tuple[str, ...]) -> List[Poly]:
    sig = [Poly.const(ring, 1)]
    for x in xs:
        nxt = [sig[0]]
        for j in range(1, len(sig) + 1):
            prev = sig[j] if j < len(sig) else Poly.zero(ring)
            nxt.append(prev + sig[j - 1] * x)
        sig = nxt
    return sig


@lru_cache(maxsize=None)
def invariant_basis(family: str, l: int, k: int) -> InvariantBasis:
    rd = make_root_data(family, l, k)
    qvars = tuple("q%d" % a for a in range(1, l + 1))
    ring = qvars + ("u",)
    half_angle = family in ("B", "D")
    root = 1
    for d in rd.weights:
        while (rat(d) * root).denominator != 1:
            root *= 2
    q = [Poly.var(ring, v) for v in qvars]
    qi = [Poly.var(ring, v, -1) for v in qvars]
    if half_angle:
        xi = [q[a] * q[a] + qi[a] * qi[a] for a in range(l)]
    else:
        xi = [q[a] + qi[a] for a in range(l)]
    sig = _elementary_symmetric(xi, ring)
    if family == "C":
        ys = [sig[j] for j in range(1, l + 1)]
    elif family == "B":
        prod = Poly.const(ring, 1)
        for a in range(l):
            prod = prod * (q[a] + qi[a])
        ys = [sig[j] for j in range(1, l)] + [prod]
    else:
        plus = Poly.const(ring, 1)
        minus = Poly.const(ring, 1)
        for a in range(l):
            plus = plus * (q[a] + qi[a])
            minus = minus * (q[a] - qi[a])
        half = QQ(1) / 2
        ys = [sig[j] for j in range(1, l - 1)] \
            + [(plus + minus).scale(half), (plus - minus).scale(half)]
    ytilde = [ys[j] * Poly.var(ring, "u", int(rat(rd.weights[j]) * root))
              for j in range(l)]
    return InvariantBasis(rd, ring, qvars, half_angle, root, xi, ys, ytilde)


def check_weyl_invariance(ib: InvariantBasis) -> None:
    """Each basis element must survive the generating symmetries."""
    l = ib.data.l
    ring = ib.ring
    ident = {v: Poly.var(ring, v) for v in ring}
    gens = []
    for a in range(l - 1):
        g = dict(ident)
        g[ib.qvars[a]] = Poly.var(ring, ib.qvars[a + 1])
        g[ib.qvars[a + 1]] = Poly.var(ring, ib.qvars[a])
        gens.append(g)
    if ib.data.family in ("B", "C"):
        g = dict(ident)
        g[ib.qvars[l - 1]] = Poly.var(ring, ib.qvars[l - 1], -1)
        gens.append(g)
    else:
        g = dict(ident)
        g[ib.qvars[l - 2]] = Poly.var(ring, ib.qvars[l - 1], -1)
        g[ib.qvars[l - 1]] = Poly.var(ring, ib.qvars[l - 2], -1)
        gens.append(g)
    for gi, g in enumerate(gens):
        for j, yj in enumerate(ib.y):
            if yj.substitute(g, ring) != yj:
                raise RuntimeError("basis element %d not invariant under "
                                   "generator %d (%s, l=%d, k=%d)"
                                   % (j + 1, gi, ib.data.family, l, ib.data.k))


# -- ambient form -------------------------------------------------------


def tilde_metric(family: str, l: int, k: int) -> PolyMatrix:
    """The printed rational pairing of the dx's; extra slot carries -1/d_k."""
    rd = make_root_data(family, l, k)
    ring: Tuple[str, ...] = ()
    n = l + 1
    rows = [[Poly.zero(ring) for _ in range(n)] for _ in range(n)]

    def put(s: int, t: int, val) -> None:
        rows[s - 1][t - 1] = Poly.const(ring, val)
        rows[t - 1][s - 1] = Poly.const(ring, val)

    half = QQ(1) / 2
    quarter = QQ(1) / 4
    if family == "C":
        for s in range(1, l + 1):
            for t in range(s, l + 1):
                put(s, t, QQ(s))
    elif family == "B":
        for s in range(1, l + 1):
            for t in range(s, l + 1):
                if t <= l - 1:
                    put(s, t, QQ(s))
                elif s <= l - 1:
                    put(s, t, QQ(s) * half)
                else:
                    put(s, t, QQ(l) * quarter)
    else:
        for s in range(1, l - 1):
            for t in range(s, l - 1):
                put(s, t, QQ(s))
            put(s, l - 1, QQ(s) * half)
            put(s, l, QQ(s) * half)
        put(l - 1, l - 1, QQ(l) * quarter)
        put(l, l, QQ(l) * quarter)
        put(l - 1, l, QQ(l - 2) * quarter)
    rows[l][l] = Poly.const(ring, -1 / rat(rd.weights[k - 1]))
    return PolyMatrix(rows)


# -- degeneration to the Weyl-group orbit space --------------------------


@dataclass
class ChevalleyReport:
    family: str
    l: int
    k: int
    symbolic_ok: bool
    det: str
    expected: str
    points: List[Dict[str, str]]
    failures: List[Dict[str, str]]
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.symbolic_ok and not self.failures


def _limit_rows(family: str, l: int, k: int, ring: Tuple[str, ...]) -> List[Poly]:
    """The degenerate basis written in square-root variables r_j**2 = rho_j."""
    r = [Poly.var(ring, "r%d" % j) for j in range(1, l + 1)]
    sq = [x * x for x in r]
    half = QQ(1) / 2
    if family == "C":
        return [sq[j] for j in range(k)] + [sq[k - 1] * sq[s] for s in range(k, l)]
    if family == "B":
        if k < l:
            return [sq[j] for j in range(k)] \
                + [sq[k - 1] * sq[s] for s in range(k, l - 1)] \
                + [r[k - 1] * r[l - 1]]
        return [sq[j] for j in range(l - 1)] + [r[l - 1]]
    if k <= l - 2:
        return [sq[j] for j in range(k)] \
            + [sq[k - 1] * sq[s] for s in range(k, l - 2)] \
            + [(r[k - 1] * (sq[l - 1] + sq[l - 2])).scale(half),
               (r[k - 1] * (sq[l - 1] - sq[l - 2])).scale(half)]
    inv = Poly.var(ring, "r%d" % l, -1)
    if k == l - 1:
        return [sq[j] for j in range(l - 2)] + [r[l - 1], sq[l - 2] * inv]
    return [sq[j] for j in range(l - 2)] + [sq[l - 2] * inv, r[l - 1]]


def _limit_expected(family: str, l: int, k: int, ring: Tuple[str, ...]) -> Tuple[Poly, str]:
    half = QQ(1) / 2
    if family == "C":
        return Poly.var(ring, "r%d" % k, 2 * (l - k)), ""
    if family == "B":
        if k < l:
            p = Poly.var(ring, "r%d" % k, 2 * (l - k) - 1, half) \
                * Poly.var(ring, "r%d" % l, -1)
            return p, ""
        note = ("the printed value 1 is the Jacobian taken with respect to the "
                "square root of the last generator; as a function of the "
                "generators themselves the determinant carries the factor "
                "1/(2 sqrt(rho_l)) verified here")
        return Poly.var(ring, "r%d" % l, -1, half), note
    if k <= l - 2:
        return Poly.var(ring, "r%d" % k, 2 * (l - k - 1), half), ""
    if k == l - 1:
        return Poly.var(ring, "r%d" % l, -2, -half), ""
    return Poly.var(ring, "r%d" % l, -2, half), ""


def chevalley_limit_check(family: str, l: int, k: int,
                          samples: int = 5, seed: int = 0) -> ChevalleyReport:
    """Jacobian of the degenerate basis against its closed form.

    The determinant is computed symbolically in variables r_j whose
    squares are the limit generators rho_j, so square roots never
    appear; on top of that the squared determinant is compared at
    random rational points, exactly.
    """
    make_root_data(family, l, k)
    ring = tuple("r%d" % j for j in range(1, l + 1))
    rows = _limit_rows(family, l, k, ring)
    jac = []
    for y0 in rows:
        row = []
        for j in range(1, l + 1):
            name = "r%d" % j
            row.append(y0.diff(name) * Poly.var(ring, name, -1).scale(QQ(1) / 2))
        jac.append(row)
    det = PolyMatrix(jac).det()
    expected, note = _limit_expected(family, l, k, ring)
    symbolic_ok = det == expected
    rng = random.Random(seed)
    points: List[Dict[str, str]] = []
    failures: List[Dict[str, str]] = []
    det_sq = det * det
    exp_sq = expected * expected
    for _ in range(samples):
        vals = {name: QQ(rng.randint(1, 40)) / QQ(rng.randint(1, 12)) for name in ring}
        got = det_sq.evaluate_exact(vals)
        want = exp_sq.evaluate_exact(vals)
        rec = {"rho": ", ".join("%s^2=%s" % (n, vals[n] ** 2) for n in ring),
               "det_sq": str(got), "expected_sq": str(want)}
        points.append(rec)
        if got != want:
            failures.append(rec)
    return ChevalleyReport(family, l, k, symbolic_ok, str(det), str(expected),
                           points, failures, note)


# -- collapsing B and D onto C ------------------------------------------


@dataclass
class BdMap:
    family: str
    l: int
    k: int
    images: Dict[str, Poly]   # target coordinates in the source y-chart ring
    beta: QQ                  # scale of the extra coordinate


def _y_ring(l: int) -> Tuple[str, ...]:
    return tuple("y%d" % j for j in range(1, l + 1)) + (E_SYMBOL,)


def bd_to_c_map(family: str, l: int, k: int) -> BdMap:
    """Dressed-coordinate substitution carrying the B/D metric to the C one.

    The target coordinates are the dressed elementary symmetric
    functions of the full-angle torus, so the slots built from
    half-angle products need their expansions: a product of l half-angle
    factors, squared, is the product of (xi_a + 2) over all a, which is
    the sum of 2**s sigma_{l-s}.  For B only the last slot is of that
    kind and the correction sum runs over every s >= 1; for D the
    product and the sum of squares of the two spinor slots split the
    same expansion by the parity of s.  The exact metric comparison in
    bd_reduction_check confirms these forms for every supported rank.

    In the image polynomials the exponential variable stands for the
    exponential of the rescaled extra coordinate of the target, which
    differs from the source one exactly when beta is not 1.
    """
    rd = make_root_data(family, l, k)
    if family == "C":
        raise ValueError("the identity map needs no reduction")
    if family == "D" and k > l - 2:
        raise ValueError("the D reduction with k = l-1 or k = l is not available")
    ring = _y_ring(l)
    yv = [Poly.var(ring, "y%d" % j) for j in range(1, l + 1)]
    images: Dict[str, Poly] = {}

    def dressed_sigma(j: int) -> Poly:
        # sigma_j of the torus, written in the dressed chart coordinates
        if j == 0:
            return Poly.var(ring, E_SYMBOL, k)
        return yv[j - 1] * Poly.var(ring, E_SYMBOL, k - min(j, k))

    if family == "B":
        for j in range(1, l):
            images["y%d" % j] = yv[j - 1]
        acc = yv[l - 1] * yv[l - 1]
        for s in range(1, l + 1):
            acc = acc - dressed_sigma(l - s).scale(2 ** s)
        images["y%d" % l] = acc
        beta = QQ(1) / 2 if k == l else QQ(1)
        return BdMap(family, l, k, images, beta)

    for j in range(1, l - 1):
        images["y%d" % j] = yv[j - 1]
    acc = yv[l - 2] * yv[l - 1]
    for s in range(3, l + 1, 2):
        acc = acc - dressed_sigma(l - s).scale(2 ** (s - 1))
    images["y%d" % (l - 1)] = acc
    acc = yv[l - 2] * yv[l - 2] + yv[l - 1] * yv[l - 1]
    for s in range(2, l + 1, 2):
        acc = acc - dressed_sigma(l - s).scale(2 ** s)
    images["y%d" % l] = acc
    return BdMap(family, l, k, images, QQ(1))


def bd_reduction_check(family: str, l: int, k: int) -> None:
    """Exact equality of the pushed-forward metric with the C metric."""
    ib = invariant_basis(family, l, k)
    bm = bd_to_c_map(family, l, k)
    rd = ib.data
    r = ib.root
    ring = ib.ring
    eexp = rat(bm.beta) * r
    if eexp.denominator != 1:
        raise RuntimeError("exponential of the reduced extra coordinate is "
                           "not a unit power (%s, l=%d, k=%d)" % (family, l, k))
    ebar = Poly.var(ring, "u", int(eexp))
    subs = {("y%d" % (j + 1)): ib.ytilde[j] for j in range(l)}
    subs[E_SYMBOL] = ebar
    Z = [bm.images["y%d" % p].substitute(subs, ring) for p in range(1, l + 1)]

    quarter = QQ(1) / 4
    dk = rat(rd.weights[k - 1])
    du = [z.dlog("u") for z in Z]
    dq = [[z.dlog(v) for v in ib.qvars] for z in Z]
    n = l + 1
    lhs = [[Poly.zero(ring) for _ in range(n)] for _ in range(n)]
    for p in range(l):
        for q in range(p, l + 1):
            if q < l:
                acc = Poly.zero(ring)
                for a in range(l):
                    acc = acc - dq[p][a] * dq[q][a]
                acc = acc.scale(quarter) + (du[p] * du[q]).scale(1 / (dk * r * r))
            else:
                acc = du[p].scale(bm.beta / (dk * r))
            lhs[p][q] = acc
            lhs[q][p] = acc
    lhs[l][l] = Poly.const(ring, bm.beta * bm.beta / dk)

    pd = metric_theta(l, k)
    md_y = transport(pd.md, pd.theta_of_y)
    subs_c = {("y%d" % (p + 1)): Z[p] for p in range(l)}
    subs_c[E_SYMBOL] = ebar
    for i in range(n):
        for j in range(n):
            got = md_y.g[i, j].substitute(subs_c, ring)
            if got != lhs[i][j]:
                raise RuntimeError(
                    "reduced metric mismatch at %d,%d (%s, l=%d, k=%d)"
                    % (i, j, family, l, k))
