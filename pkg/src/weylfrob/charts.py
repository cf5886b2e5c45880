"""Charts, chart maps, and transport of metric data between charts.

A chart is an ordered tuple of coordinate axes on the same underlying
space.  Ordinary axes are Laurent-polynomial variables.  A chart may
additionally end with the special axis LOG: it then has one coordinate
that functions only ever see through its exponential, stored as the
ring variable _E.  Differentiating along the LOG axis is the derivation
E d/dE, so polynomial and LOG axes can be treated uniformly.

A ChartMap writes every old coordinate as a Laurent polynomial in the
new ones.  That is the direction transport needs: substituting the
images into a tensor written in old coordinates yields a function of
the new ones.  When both charts carry a LOG axis the map must fix it,
the only case required here.

MetricData bundles a contravariant metric g[i, j] = (dx^i, dx^j) with
contravariant Christoffel symbols gamma[r][i, j] = Gamma^{ij}_r, the
lower index r running over the chart axes.  transport() moves the
bundle across a ChartMap whose Jacobian has unit-monomial determinant,
so that the inverse Jacobian is again a polynomial matrix.

christoffels_covariant() produces the classical lowered-index symbols
gamma^c_{ab} of a metric, and flat_solve() solves the linear flatness
equations Hess(f) = gamma . grad(f) over a given ansatz.  Together they
turn the search for flat coordinates of a block metric into exact
linear algebra.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .laurent import E_SYMBOL, Poly, QQ
from .linalg import LinearInconsistent, PolyMatrix, invert_unit_jacobian, solve_linear

LOG = "log"


class Chart:
    """An ordered tuple of coordinate axes sharing one Laurent ring."""

    __slots__ = ("name", "axes", "ring")

    def __init__(self, name: str, axes: Sequence[str]):
        axes = tuple(axes)
        if len(set(axes)) != len(axes):
            raise ValueError("duplicate axes: %r" % (axes,))
        if LOG in axes and axes[-1] != LOG:
            raise ValueError("the LOG axis must come last")
        if E_SYMBOL in axes:
            raise ValueError("%s is reserved for the ring; use LOG" % E_SYMBOL)
        self.name = name
        self.axes = axes
        poly = tuple(a for a in axes if a != LOG)
        self.ring = poly + ((E_SYMBOL,) if LOG in axes else ())

    @property
    def dim(self) -> int:
        return len(self.axes)

    def has_log(self) -> bool:
        return LOG in self.axes

    def var(self, axis: str) -> Poly:
        if axis == LOG:
            raise ValueError("the LOG coordinate itself is not a ring element")
        return Poly.var(self.ring, axis)

    def e_var(self) -> Poly:
        if not self.has_log():
            raise ValueError("chart %s has no LOG axis" % self.name)
        return Poly.var(self.ring, E_SYMBOL)

    def zero(self) -> Poly:
        return Poly.zero(self.ring)

    def const(self, c) -> Poly:
        return Poly.const(self.ring, c)

    def axis_diff(self, p: Poly, axis: str) -> Poly:
        return p.dlog(E_SYMBOL) if axis == LOG else p.diff(axis)

    def __repr__(self) -> str:
        return "Chart(%s: %s)" % (self.name, ",".join(self.axes))


class ChartMap:
    """Old coordinates written as polynomials in a new chart."""

    __slots__ = ("old", "new", "images", "_subs")

    def __init__(self, old: Chart, new: Chart, images: Mapping[str, Poly]):
        self.old = old
        self.new = new
        imgs: Dict[str, Poly] = {}
        for a in old.axes:
            if a == LOG:
                continue
            if a not in images:
                raise ValueError("missing image for axis %s" % a)
            img = images[a]
            if img.vars != new.ring:
                raise ValueError("image of %s lives in the wrong ring" % a)
            imgs[a] = img
        if old.has_log() and not new.has_log():
            raise ValueError("cannot map a LOG chart into a purely polynomial one")
        extra = set(images) - set(imgs)
        if extra:
            raise ValueError("images for unknown axes: %r" % sorted(extra))
        self.images = imgs
        subs = dict(imgs)
        if old.has_log():
            subs[E_SYMBOL] = Poly.var(new.ring, E_SYMBOL)
        self._subs = subs

    def push(self, p: Poly) -> Poly:
        """Rewrite a function of the old coordinates in the new chart."""
        if p.vars != self.old.ring:
            raise ValueError("polynomial lives in the wrong ring")
        return p.substitute(self._subs, self.new.ring)

    def jacobian(self) -> PolyMatrix:
        """J[a, r] = d(old axis a) / d(new axis r); rows old, columns new."""
        rows: List[List[Poly]] = []
        for a in self.old.axes:
            if a == LOG:
                row = [Poly.const(self.new.ring, 1 if r == LOG else 0)
                       for r in self.new.axes]
            else:
                img = self.images[a]
                row = [self.new.axis_diff(img, r) for r in self.new.axes]
            rows.append(row)
        return PolyMatrix(rows)

    def then(self, second: "ChartMap") -> "ChartMap":
        """Compose two maps: self writes A in B, second writes B in C."""
        if self.new.axes != second.old.axes:
            raise ValueError("charts do not chain: %r then %r" % (self.new, second.old))
        images = {a: second.push(img) for a, img in self.images.items()}
        return ChartMap(self.old, second.new, images)


@dataclass
class MetricData:
    """Contravariant metric plus contravariant Christoffel symbols.

    gamma[r][i, j] = Gamma^{ij}_r with r indexed by chart axis position.
    """

    chart: Chart
    g: PolyMatrix
    gamma: List[PolyMatrix]


def transport(md: MetricData, cmap: ChartMap) -> MetricData:
    """Move a metric and its Christoffel symbols across a chart map.

    With J[a, r] = dx^a/dy^r the metric goes to Jinv g Jinv^T and the
    symbols pick up, besides the tensor part contracted with J, the
    inhomogeneous term -g_new . L with L^t_{ms} built from the second
    derivatives of the coordinate images.
    """
    if md.chart.axes != cmap.old.axes:
        raise ValueError("metric lives on chart %r, map starts at %r"
                         % (md.chart, cmap.old))
    new = cmap.new
    n_new = new.dim
    n_old = md.chart.dim
    J = cmap.jacobian()
    Jinv = invert_unit_jacobian(J)
    JinvT = Jinv.transpose()
    g_new = Jinv * md.g.map(cmap.push) * JinvT
    tensor = [Jinv * md.gamma[b].map(cmap.push) * JinvT for b in range(n_old)]
    first: List[Optional[List[Poly]]] = []
    for a in md.chart.axes:
        if a == LOG:
            first.append(None)
        else:
            img = cmap.images[a]
            first.append([new.axis_diff(img, r) for r in new.axes])
    zero_row = [Poly.zero(new.ring)] * n_new
    gamma_new: List[PolyMatrix] = []
    for s, ax_s in enumerate(new.axes):
        total = PolyMatrix.zeros(new.ring, n_new, n_new)
        for b in range(n_old):
            w = J[b, s]
            if w.is_zero():
                continue
            total = total + tensor[b].map(lambda p, w=w: p * w)
        rows: List[List[Poly]] = []
        for c in range(n_old):
            f = first[c]
            if f is None:
                rows.append(list(zero_row))
            else:
                fs = f[s]
                rows.append([new.axis_diff(fs, m) for m in new.axes])
        hess = PolyMatrix(rows)
        L = Jinv * hess
        gamma_new.append(total - g_new * L.transpose())
    return MetricData(new, g_new, gamma_new)


def christoffels_covariant(chart: Chart, g: PolyMatrix) -> List[PolyMatrix]:
    """Classical symbols gamma^c_{ab} of the metric given contravariantly.

    Returns out[c][a, b] = gamma^c_{ab}.  The metric must have a
    unit-monomial determinant so its inverse stays polynomial.
    """
    n = chart.dim
    G = g.inverse_unit_det()
    dG = [G.map(lambda p, a=a: chart.axis_diff(p, a)) for a in chart.axes]
    half = QQ(1) / QQ(2)
    low: List[PolyMatrix] = []
    for d in range(n):
        rows = []
        for a in range(n):
            row = []
            for b in range(n):
                p = dG[a][d, b] + dG[b][d, a] - dG[d][a, b]
                row.append(p.scale(half))
            rows.append(row)
        low.append(PolyMatrix(rows))
    out: List[PolyMatrix] = []
    for c in range(n):
        m = PolyMatrix.zeros(chart.ring, n, n)
        for d in range(n):
            w = g[c, d]
            if w.is_zero():
                continue
            m = m + low[d].map(lambda p, w=w: p * w)
        out.append(m)
    return out


def flat_solve(chart: Chart, gammas: List[PolyMatrix], f0: Poly,
               candidates: Sequence[Poly],
               axes: Optional[Sequence[str]] = None) -> Tuple[Poly, List[QQ]]:
    """Solve Hess(f) = gamma . grad(f) for f = f0 + sum c_i candidates[i].

    gammas are lowered-index symbols as from christoffels_covariant.
    The Hessian condition is imposed for every unordered pair of the
    given axes (all axes when omitted); the gradient runs over all
    axes.  The affine system must have exactly one solution; an
    underdetermined system raises, an inconsistent one propagates
    LinearInconsistent.
    """
    ax = list(axes) if axes is not None else list(chart.axes)
    pos = {a: i for i, a in enumerate(chart.axes)}
    funcs = [f0] + list(candidates)
    grads = [[chart.axis_diff(f, a) for a in chart.axes] for f in funcs]
    residual_rows: List[List[Poly]] = []
    for ia, a in enumerate(ax):
        for b in ax[ia:]:
            pa, pb = pos[a], pos[b]
            row = []
            for fi, f in enumerate(funcs):
                r = chart.axis_diff(grads[fi][pa], b)
                for c in range(chart.dim):
                    w = gammas[c][pa, pb]
                    if w.is_zero():
                        continue
                    r = r - w * grads[fi][c]
                row.append(r)
            residual_rows.append(row)
    rows: List[List[QQ]] = []
    rhs: List[QQ] = []
    for row in residual_rows:
        keys = set()
        for r in row:
            keys.update(r.terms)
        for key in sorted(keys):
            rows.append([r.terms.get(key, QQ(0)) for r in row[1:]])
            rhs.append(-row[0].terms.get(key, QQ(0)))
    if not candidates:
        if any(x != 0 for x in rhs):
            raise LinearInconsistent(0, None)
        return f0, []
    sol, kernel = solve_linear(rows, rhs)
    if kernel:
        raise ValueError("flatness system is underdetermined (%d-dim freedom)"
                         % len(kernel))
    f = f0
    for c, cand in zip(sol, candidates):
        if c != 0:
            f = f + cand.scale(c)
    return f, sol
