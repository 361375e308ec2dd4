"""Matrices over graded scalars, plus the matrix Lie-algebra templates.

Sizes here are tiny (at most m+2 for spacetime dimension m <= 4), so the
representation is a dense tuple-of-tuples of Expr.  The graded product is
the ordinary matrix product with Expr multiplication in entry order, which
carries all the Koszul signs automatically.
"""

from __future__ import annotations

from fractions import Fraction

from .graded import Expr, GradedError


class DimensionError(GradedError):
    """Matrix shapes do not fit the requested operation."""


class MatrixExpr:
    __slots__ = ("rows", "cols", "entries", "template_tag")

    def __init__(self, entries, template_tag=None):
        entries = tuple(tuple(_as_expr(x) for x in row) for row in entries)
        if not entries or not entries[0]:
            raise DimensionError("empty matrix")
        w = len(entries[0])
        if any(len(row) != w for row in entries):
            raise DimensionError("ragged rows")
        self.rows = len(entries)
        self.cols = w
        self.entries = entries
        self.template_tag = template_tag

    @staticmethod
    def zeros(rows, cols):
        z = Expr.zero()
        return MatrixExpr([[z] * cols for _ in range(rows)])

    @staticmethod
    def identity(n):
        one = Expr.const(1)
        z = Expr.zero()
        return MatrixExpr([[one if i == j else z for j in range(n)] for i in range(n)])

    @staticmethod
    def from_rational(rows):
        return MatrixExpr([[Expr.const(x) for x in row] for row in rows])

    def __getitem__(self, ij):
        return self.entries[ij[0]][ij[1]]

    def with_tag(self, tag):
        return MatrixExpr(self.entries, template_tag=tag)

    @property
    def is_zero(self):
        return all(e.is_zero for row in self.entries for e in row)

    def shape(self):
        return (self.rows, self.cols)

    def __add__(self, other):
        self._same_shape(other)
        return MatrixExpr([[a + b for a, b in zip(r1, r2)]
                           for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._same_shape(other)
        return MatrixExpr([[a - b for a, b in zip(r1, r2)]
                           for r1, r2 in zip(self.entries, other.entries)])

    def __neg__(self):
        return MatrixExpr([[-a for a in row] for row in self.entries])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Expr)):
            return MatrixExpr([[a * other if isinstance(other, (int, Fraction)) else a * other
                                for a in row] for row in self.entries])
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.__mul__(other)
        if isinstance(other, Expr):
            return MatrixExpr([[other * a for a in row] for row in self.entries])
        return NotImplemented

    def scale(self, c):
        return self.__mul__(c)

    def __matmul__(self, other):
        return mat_product_graded(self, other)

    def __eq__(self, other):
        if not isinstance(other, MatrixExpr):
            return NotImplemented
        return self.shape() == other.shape() and self.entries == other.entries

    def transpose(self):
        return MatrixExpr([[self.entries[i][j] for i in range(self.rows)]
                           for j in range(self.cols)])

    def map(self, f):
        return MatrixExpr([[f(a) for a in row] for row in self.entries])

    def total_parity(self):
        """Parity shared by all nonzero entries; None for the zero matrix."""
        p = None
        for row in self.entries:
            for e in row:
                if e.is_zero:
                    continue
                q = e.parity()
                if q is None:
                    raise GradedError("entry of mixed parity")
                if p is None:
                    p = q
                elif p != q:
                    raise GradedError("matrix is not parity-homogeneous")
        return p

    def term_count(self):
        return sum(e.term_count() for row in self.entries for e in row)

    def render(self):
        body = []
        for row in self.entries:
            body.append("[" + ", ".join(e.render() for e in row) + "]")
        return "[" + ",\n ".join(body) + "]"

    __repr__ = render

    def _same_shape(self, other):
        if self.shape() != other.shape():
            raise DimensionError("shape mismatch %s vs %s" % (self.shape(), other.shape()))


def _as_expr(x):
    if isinstance(x, Expr):
        return x
    return Expr.const(x)


def mat_product_graded(a, b):
    if a.cols != b.rows:
        raise DimensionError("inner dimensions %d vs %d" % (a.cols, b.rows))
    out = []
    for i in range(a.rows):
        row = []
        for j in range(b.cols):
            acc = Expr.zero()
            for k in range(a.cols):
                x = a.entries[i][k]
                y = b.entries[k][j]
                if x.is_zero or y.is_zero:
                    continue
                acc = acc + x * y
            row.append(acc)
        out.append(row)
    return MatrixExpr(out)


def graded_commutator(a, b):
    """[a, b] = ab - (-1)^{|a||b|} ba for parity-homogeneous a, b."""
    if a.rows != a.cols or b.rows != b.cols or a.rows != b.rows:
        raise DimensionError("commutator needs equal square matrices")
    pa = a.total_parity()
    pb = b.total_parity()
    ab = mat_product_graded(a, b)
    ba = mat_product_graded(b, a)
    if pa and pb:
        return ab + ba
    return ab - ba


def apply_entrywise(op, mat):
    return mat.map(op)


class EtaMetric:
    """Constant diagonal signature matrix; default Minkowski (-,+,...,+)."""

    def __init__(self, m, signs=None):
        if signs is None:
            signs = (-1,) + (1,) * (m - 1)
        signs = tuple(int(s) for s in signs)
        if len(signs) != m or any(s not in (-1, 1) for s in signs):
            raise DimensionError("eta must be a diagonal of +-1 of size %d" % m)
        self.m = m
        self.signs = signs

    def matrix(self):
        return MatrixExpr.from_rational(
            [[self.signs[i] if i == j else 0 for j in range(self.m)] for i in range(self.m)])

    def inverse_matrix(self):
        return self.matrix()  # diagonal +-1 is its own inverse

    def __getitem__(self, i):
        return self.signs[i]


def eta_transpose(v, eta):
    """Eta-transposition: row r -> (r eta^-1)^T, column tau -> (eta tau)^T."""
    if v.rows == 1:
        if v.cols != eta.m:
            raise DimensionError("row length %d vs eta size %d" % (v.cols, eta.m))
        return MatrixExpr([[v.entries[0][j] * Fraction(eta[j])] for j in range(eta.m)])
    if v.cols == 1:
        if v.rows != eta.m:
            raise DimensionError("column length %d vs eta size %d" % (v.rows, eta.m))
        return MatrixExpr([[v.entries[i][0] * Fraction(eta[i]) for i in range(eta.m)]])
    raise DimensionError("eta transposition needs a row or column vector")


class LieTemplate:
    """Block template of one of the matrix Lie algebras used by the scenes.

    name: poincare, mobius, lorentz or co; dimension is the matrix size.
    membership(M) returns a list of Exprs that all vanish iff M fits the
    template; sectors (Moebius only) map labels to entry positions.
    """

    def __init__(self, name, m, eta):
        self.name = name
        self.m = m
        self.eta = eta
        if name == "poincare":
            self.dimension = m + 1
        elif name == "mobius":
            self.dimension = m + 2
        elif name in ("lorentz", "co"):
            self.dimension = m
        else:
            raise DimensionError("unknown template %r" % name)
        self.sectors = self._sector_map() if name == "mobius" else None

    def _sector_map(self):
        m = self.m
        n = m + 2
        g_minus = [(i, 0) for i in range(1, m + 1)] + [(n - 1, j) for j in range(1, m + 1)]
        g_plus = [(0, j) for j in range(1, m + 1)] + [(i, n - 1) for i in range(1, m + 1)]
        g_zero = [(i, j) for i in range(n) for j in range(n)
                  if (i, j) not in g_minus and (i, j) not in g_plus]
        return {"g-1": tuple(g_minus), "g0": tuple(g_zero), "g+1": tuple(g_plus)}

    def membership(self, M):
        if M.rows != self.dimension or M.cols != self.dimension:
            raise DimensionError("expected size %d" % self.dimension)
        eta = self.eta
        m = self.m
        conds = []
        if self.name == "lorentz":
            # eta M + M^T eta = 0
            for a in range(m):
                for b in range(a, m):
                    conds.append(M[a, b] * Fraction(eta[a]) + M[b, a] * Fraction(eta[b]))
            return conds
        if self.name == "co":
            # eta M + M^T eta proportional to eta, coefficient 2 tr(M)/m
            tr = Expr.zero()
            for a in range(m):
                tr = tr + M[a, a]
            for a in range(m):
                for b in range(a, m):
                    c = M[a, b] * Fraction(eta[a]) + M[b, a] * Fraction(eta[b])
                    if a == b:
                        c = c - tr * Fraction(2 * eta[a], m)
                    conds.append(c)
            return conds
        if self.name == "poincare":
            for j in range(m + 1):
                conds.append(M[m, j])
            sub = MatrixExpr([[M[a, b] for b in range(m)] for a in range(m)])
            conds.extend(LieTemplate("lorentz", m, eta).membership(sub))
            return conds
        # mobius
        n = m + 2
        conds.append(M[0, n - 1])
        conds.append(M[n - 1, 0])
        conds.append(M[0, 0] + M[n - 1, n - 1])
        # last row determined by the tau column, last column by the iota row
        for b in range(m):
            conds.append(M[n - 1, 1 + b] - M[1 + b, 0] * Fraction(eta[b]))
        for a in range(m):
            conds.append(M[1 + a, n - 1] - M[0, 1 + a] * Fraction(eta[a]))
        sub = MatrixExpr([[M[1 + a, 1 + b] for b in range(m)] for a in range(m)])
        conds.extend(LieTemplate("lorentz", m, eta).membership(sub))
        return conds

    def is_member(self, M):
        return all(c.is_zero for c in self.membership(M))

    def sector_project(self, M, sector):
        if self.sectors is None or sector not in self.sectors:
            raise DimensionError("unknown sector %r" % sector)
        keep = set(self.sectors[sector])
        z = Expr.zero()
        return MatrixExpr([[M[i, j] if (i, j) in keep else z
                            for j in range(M.cols)] for i in range(M.rows)])


def build_lie_template(name, m, eta=None):
    if name == "poincare" and m < 2:
        raise DimensionError("poincare template needs m >= 2")
    if name == "mobius" and m < 3:
        raise DimensionError("mobius template needs m >= 3")
    if eta is None:
        eta = EtaMetric(m)
    return LieTemplate(name, m, eta)


def sector_project(M, template, sector):
    return template.sector_project(M, sector)


def so_matrix(family_entry, m, eta):
    """Assemble an so(eta) matrix from entries given for a < b only.

    family_entry(a, b) supplies the (a, b) entry for a < b; the rest is
    fixed by eta-antisymmetry: M[b,a] = -eta_a eta_b M[a,b], zero diagonal.
    """
    z = Expr.zero()
    rows = []
    for a in range(m):
        row = []
        for b in range(m):
            if a < b:
                row.append(family_entry(a, b))
            elif a > b:
                row.append(family_entry(b, a) * Fraction(-eta[b] * eta[a]))
            else:
                row.append(z)
        rows.append(row)
    return MatrixExpr(rows)
