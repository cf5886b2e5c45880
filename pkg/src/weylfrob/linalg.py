"""Exact linear algebra over the rationals and over Laurent-polynomial rings.

Two layers live here.  Plain rational systems (lists of QQ) are solved
by Gaussian elimination with exact pivots, returning a particular
solution plus a kernel basis so callers can insist on uniqueness.
Matrices of Laurent polynomials get determinants and adjugates through
a subset dynamic program; inverses exist in the ring only when the
determinant is a unit monomial, and inverse_unit_det refuses anything
else.
"""

from __future__ import annotations

from typing import List, Sequence, Tuple

from .laurent import Poly, QQ, rat


class LinearInconsistent(Exception):
    """Raised when an exact linear system has no solution.

    The offending reduced row (all zero coefficients, nonzero right side)
    is attached as a certificate.
    """

    def __init__(self, row_index: int, rhs):
        super().__init__(
            "inconsistent linear system: row %d reduces to 0 = %s" % (row_index, rhs)
        )
        self.row_index = row_index
        self.rhs = rhs


def solve_linear(rows: Sequence[Sequence], rhs: Sequence) -> Tuple[List, List[List]]:
    """Solve A x = b exactly.  Returns (particular, kernel_basis).

    rows and rhs are coerced to QQ.  kernel_basis is a list of vectors
    spanning the null space; empty means the solution is unique.
    """
    m = len(rows)
    if m != len(rhs):
        raise ValueError("shape mismatch")
    n = len(rows[0]) if m else 0
    a = [[rat(x) for x in r] for r in rows]
    b = [rat(x) for x in rhs]
    for r in a:
        if len(r) != n:
            raise ValueError("ragged matrix")

    pivot_cols: List[int] = []
    row = 0
    for col in range(n):
        pr = None
        for r in range(row, m):
            if a[r][col] != 0:
                pr = r
                break
        if pr is None:
            continue
        a[row], a[pr] = a[pr], a[row]
        b[row], b[pr] = b[pr], b[row]
        piv = a[row][col]
        inv = 1 / piv
        a[row] = [x * inv for x in a[row]]
        b[row] = b[row] * inv
        for r in range(m):
            if r != row and a[r][col] != 0:
                f = a[r][col]
                ar, arow = a[r], a[row]
                a[r] = [x - f * y for x, y in zip(ar, arow)]
                b[r] = b[r] - f * b[row]
        pivot_cols.append(col)
        row += 1
        if row == m:
            break
    for r in range(row, m):
        if b[r] != 0:
            raise LinearInconsistent(r, b[r])

    x = [QQ(0)] * n
    for i, col in enumerate(pivot_cols):
        x[col] = b[i]
    free = [c for c in range(n) if c not in set(pivot_cols)]
    kernel = []
    for fc in free:
        v = [QQ(0)] * n
        v[fc] = QQ(1)
        for i, col in enumerate(pivot_cols):
            v[col] = -a[i][fc]
        kernel.append(v)
    return x, kernel


def invert_rational(mat: Sequence[Sequence]) -> List[List]:
    """Exact inverse of a square rational matrix."""
    n = len(mat)
    a = [[rat(x) for x in r] + [QQ(1) if i == j else QQ(0) for j in range(n)]
         for i, r in enumerate(mat)]
    for col in range(n):
        pr = None
        for r in range(col, n):
            if a[r][col] != 0:
                pr = r
                break
        if pr is None:
            raise ValueError("singular matrix")
        a[col], a[pr] = a[pr], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [r[n:] for r in a]


def mat_mul_rational(A, B):
    return [[sum((rat(A[i][k]) * rat(B[k][j]) for k in range(len(B))), QQ(0))
             for j in range(len(B[0]))] for i in range(len(A))]


class PolyMatrix:
    """Dense matrix of Poly entries, all in one ring."""

    __slots__ = ("rows", "vars")

    def __init__(self, rows: List[List[Poly]]):
        self.rows = rows
        self.vars = rows[0][0].vars
        for r in rows:
            for p in r:
                if p.vars != self.vars:
                    raise ValueError("mixed rings in matrix")

    @property
    def shape(self):
        return (len(self.rows), len(self.rows[0]))

    @classmethod
    def identity(cls, vars: Tuple[str, ...], n: int) -> "PolyMatrix":
        one = Poly.const(vars, 1)
        zero = Poly.zero(vars)
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, vars: Tuple[str, ...], m: int, n: int) -> "PolyMatrix":
        return cls([[Poly.zero(vars) for _ in range(n)] for _ in range(m)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def set(self, i: int, j: int, p: Poly):
        self.rows[i][j] = p

    def __mul__(self, other: "PolyMatrix") -> "PolyMatrix":
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise ValueError("shape mismatch")
        out = []
        for i in range(n):
            row = []
            for j in range(m):
                acc = Poly.zero(self.vars)
                for s in range(k):
                    a = self.rows[i][s]
                    b = other.rows[s][j]
                    if a.terms and b.terms:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return PolyMatrix(out)

    def transpose(self) -> "PolyMatrix":
        n, m = self.shape
        return PolyMatrix([[self.rows[i][j] for i in range(n)] for j in range(m)])

    def map(self, f) -> "PolyMatrix":
        return PolyMatrix([[f(p) for p in row] for row in self.rows])

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        n, m = self.shape
        return PolyMatrix([[self.rows[i][j] + other.rows[i][j] for j in range(m)]
                           for i in range(n)])

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        n, m = self.shape
        return PolyMatrix([[self.rows[i][j] - other.rows[i][j] for j in range(m)]
                           for i in range(n)])

    def is_zero(self) -> bool:
        return all(p.is_zero() for row in self.rows for p in row)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __ne__(self, other) -> bool:
        r = self.__eq__(other)
        return NotImplemented if r is NotImplemented else not r

    def __hash__(self):
        raise TypeError("PolyMatrix is unhashable")

    def det(self) -> Poly:
        """Determinant by dynamic programming over column subsets."""
        n, m = self.shape
        if n != m:
            raise ValueError("determinant of nonsquare matrix")
        if n == 0:
            return Poly.const(self.vars, 1)
        f = {0: Poly.const(self.vars, 1)}
        for mask in range(1, 1 << n):
            cols = [j for j in range(n) if mask >> j & 1]
            r = len(cols) - 1  # row index being expanded
            acc = Poly.zero(self.vars)
            for pos, j in enumerate(cols):
                entry = self.rows[r][j]
                if not entry.terms:
                    continue
                sub = f[mask & ~(1 << j)]
                if not sub.terms:
                    continue
                term = entry * sub
                if (len(cols) - 1 - pos) % 2:
                    term = -term
                acc = acc + term
            f[mask] = acc
        return f[(1 << n) - 1]

    def minor(self, i: int, j: int) -> "PolyMatrix":
        rows = [[p for jj, p in enumerate(row) if jj != j]
                for ii, row in enumerate(self.rows) if ii != i]
        return PolyMatrix(rows)

    def adjugate(self) -> "PolyMatrix":
        n, m = self.shape
        if n != m:
            raise ValueError("adjugate of nonsquare matrix")
        if n == 1:
            return PolyMatrix([[Poly.const(self.vars, 1)]])
        adj = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                c = self.minor(i, j).det()
                if (i + j) % 2:
                    c = -c
                adj[j][i] = c
        return PolyMatrix(adj)

    def inverse_unit_det(self) -> "PolyMatrix":
        """Inverse, valid in the Laurent ring: requires a unit-monomial det."""
        d = self.det()
        if len(d.terms) != 1:
            raise ValueError(
                "matrix determinant is not a unit monomial (%d terms); "
                "no Laurent inverse" % len(d.terms))
        dinv = d.unit_inverse()
        return self.adjugate().map(lambda p: p * dinv)

    def substitute(self, images, target_vars) -> "PolyMatrix":
        return self.map(lambda p: p.substitute(images, target_vars))


def invert_unit_jacobian(jac: PolyMatrix) -> PolyMatrix:
    """Exact inverse of a chart Jacobian whose determinant is a unit monomial.

    Raises ValueError when the determinant has more than one term, since
    such a matrix has no inverse with Laurent-polynomial entries.
    """
    return jac.inverse_unit_det()
