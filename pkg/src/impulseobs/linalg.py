"""Exact linear algebra over the rationals and over Q[s].

Entries are :class:`fractions.Fraction`. Rank and determinants go through
fraction-free Bareiss elimination on row-scaled integer copies; nullspaces
and linear solves go through Gauss-Jordan elimination over Q.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

__all__ = [
    "Fraction",
    "RationalMatrix",
    "RationalPolynomial",
    "PolynomialMatrix",
    "SingularMatrixError",
    "to_fraction",
    "rank",
    "det",
    "rref",
    "nullspace_basis",
    "det_poly",
    "solve_invertible",
    "solve_poly_cramer",
]


class SingularMatrixError(ValueError):
    pass


def to_fraction(x) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are refused: they would smuggle rounding error into exact code.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"not an exact rational: {x!r}")


class RationalMatrix:
    """Immutable dense matrix of Fractions, stored row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable = ()):
        entries = tuple(to_fraction(x) for x in entries)
        if rows < 0 or cols < 0:
            raise ValueError("negative dimension")
        if len(entries) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {len(entries)}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("RationalMatrix is immutable")

    # construction

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "RationalMatrix":
        rows = [list(r) for r in rows]
        if not rows:
            return cls(0, cols or 0)
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged rows")
        if cols is not None and cols != width:
            raise ValueError(f"expected {cols} columns, got {width}")
        return cls(len(rows), width, (x for r in rows for x in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls(rows, cols, [0] * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(n, n, [1 if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def column(cls, values: Iterable) -> "RationalMatrix":
        values = list(values)
        return cls(len(values), 1, values)

    @classmethod
    def block(cls, blocks: Sequence[Sequence["RationalMatrix | None"]],
              row_sizes: Sequence[int], col_sizes: Sequence[int]) -> "RationalMatrix":
        """Assemble from a grid of blocks; ``None`` stands for a zero block."""
        out = [[Fraction(0)] * sum(col_sizes) for _ in range(sum(row_sizes))]
        r0 = 0
        for bi, h in enumerate(row_sizes):
            c0 = 0
            for bj, w in enumerate(col_sizes):
                blk = blocks[bi][bj]
                if blk is not None:
                    if blk.shape != (h, w):
                        raise ValueError(f"block ({bi},{bj}) has shape {blk.shape}, expected {(h, w)}")
                    for i in range(h):
                        out[r0 + i][c0:c0 + w] = blk.row(i)
                c0 += w
            r0 += h
        return cls(len(out), sum(col_sizes), (x for r in out for x in r))

    @classmethod
    def vstack(cls, *mats: "RationalMatrix") -> "RationalMatrix":
        cols = {m.cols for m in mats}
        if len(cols) != 1:
            raise ValueError("vstack needs equal column counts")
        return cls(sum(m.rows for m in mats), cols.pop(), (x for m in mats for x in m.entries))

    @classmethod
    def hstack(cls, *mats: "RationalMatrix") -> "RationalMatrix":
        rows = {m.rows for m in mats}
        if len(rows) != 1:
            raise ValueError("hstack needs equal row counts")
        h = rows.pop()
        return cls(h, sum(m.cols for m in mats),
                   (x for i in range(h) for m in mats for x in m.row(i)))

    @classmethod
    def block_diag(cls, *mats: "RationalMatrix") -> "RationalMatrix":
        grid = [[m if i == j else None for j, m in enumerate(mats)] for i in range(len(mats))]
        return cls.block(grid, [m.rows for m in mats], [m.cols for m in mats])

    # access

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> list[Fraction]:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def col(self, j: int) -> list[Fraction]:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def to_rows(self) -> list[list[Fraction]]:
        return [self.row(i) for i in range(self.rows)]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix(len(rows), len(cols), (self[i, j] for i in rows for j in cols))

    def is_zero(self) -> bool:
        return not any(self.entries)

    # arithmetic

    @property
    def T(self) -> "RationalMatrix":
        return RationalMatrix(self.cols, self.rows,
                              (self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)))

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return RationalMatrix(self.rows, self.cols, (a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return RationalMatrix(self.rows, self.cols, (a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix(self.rows, self.cols, (-a for a in self.entries))

    def scale(self, c) -> "RationalMatrix":
        c = to_fraction(c)
        return RationalMatrix(self.rows, self.cols, (c * a for a in self.entries))

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        ocols = [other.col(j) for j in range(other.cols)]
        out = []
        for i in range(self.rows):
            r = self.row(i)
            out.extend(sum((a * b for a, b in zip(r, c) if a and b), Fraction(0)) for c in ocols)
        return RationalMatrix(self.rows, other.cols, out)

    def apply(self, v: Sequence) -> list[Fraction]:
        """Matrix-vector product for a plain sequence."""
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        v = [to_fraction(x) for x in v]
        return [sum((a * b for a, b in zip(self.row(i), v) if a and b), Fraction(0))
                for i in range(self.rows)]

    def __pow__(self, k: int) -> "RationalMatrix":
        if self.rows != self.cols or k < 0:
            raise ValueError("power needs a square matrix and k >= 0")
        out = RationalMatrix.identity(self.rows)
        for _ in range(k):
            out = out @ self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(_fmt(x) for x in r) + "]" for r in self.to_rows())
        return f"RationalMatrix({self.rows}x{self.cols}: [{body}])"


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# scalar kernels

def _integer_rows(M: RationalMatrix) -> tuple[list[list[int]], int]:
    """Scale each row by the lcm of its denominators.

    Returns the integer rows and the product of the scale factors.
    """
    out, scale = [], 1
    for i in range(M.rows):
        r = M.row(i)
        d = math.lcm(*(x.denominator for x in r)) if r else 1
        out.append([x.numerator * (d // x.denominator) for x in r])
        scale *= d
    return out, scale


def _bareiss(a: list[list[int]], ncols: int) -> tuple[int, int]:
    """In-place fraction-free echelon reduction.

    Pivots on the first nonzero entry of each column. Returns (rank, sign of
    the row permutation). After the call, for square full-rank input, the
    last diagonal entry is the determinant up to that sign.
    """
    nrows = len(a)
    r, prev, sign = 0, 1, 1
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if a[i][c]), None)
        if piv is None:
            continue
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
            sign = -sign
        prow, p = a[r], a[r][c]
        for i in range(r + 1, nrows):
            row, f = a[i], a[i][c]
            if f:
                for j in range(c + 1, ncols):
                    row[j] = (p * row[j] - f * prow[j]) // prev
            else:
                for j in range(c + 1, ncols):
                    row[j] = (p * row[j]) // prev
            row[c] = 0
        prev = p
        r += 1
    return r, sign


def rank(M: RationalMatrix) -> int:
    """Exact rank by fraction-free elimination."""
    if M.rows == 0 or M.cols == 0:
        return 0
    a, _ = _integer_rows(M)
    return _bareiss(a, M.cols)[0]


def det(M: RationalMatrix) -> Fraction:
    """Exact determinant by fraction-free elimination."""
    if M.rows != M.cols:
        raise ValueError("determinant of a non-square matrix")
    n = M.rows
    if n == 0:
        return Fraction(1)
    a, scale = _integer_rows(M)
    r, sign = _bareiss(a, n)
    if r < n:
        return Fraction(0)
    return Fraction(sign * a[n - 1][n - 1], scale)


def rref(M: RationalMatrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row-echelon form over Q and the list of pivot columns."""
    a = M.to_rows()
    pivots: list[int] = []
    r = 0
    for c in range(M.cols):
        if r == M.rows:
            break
        piv = next((i for i in range(r, M.rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        if p != 1:
            a[r] = [x / p if x else x for x in a[r]]
        prow = a[r]
        nz = [j for j in range(c, M.cols) if prow[j]]
        for i in range(M.rows):
            f = a[i][c]
            if i != r and f:
                row = a[i]
                for j in nz:
                    row[j] -= f * prow[j]
        pivots.append(c)
        r += 1
    return a, pivots


def nullspace_basis(M: RationalMatrix) -> list[RationalMatrix]:
    """Kernel basis read off the RREF.

    One column vector per free variable, in ascending column order; the
    vector's own free entry is 1 and every other free entry is 0.
    """
    R, pivots = rref(M)
    pivset = set(pivots)
    basis = []
    for f in range(M.cols):
        if f in pivset:
            continue
        x = [Fraction(0)] * M.cols
        x[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            x[pc] = -R[i][f]
        basis.append(RationalMatrix.column(x))
    return basis


def solve_invertible(M: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    """Unique solution of ``M x = b`` for square nonsingular M (b may have several columns)."""
    if M.rows != M.cols:
        raise ValueError("solve_invertible needs a square matrix")
    if b.rows != M.rows:
        raise ValueError("right-hand side has the wrong number of rows")
    n = M.rows
    aug = RationalMatrix.hstack(M, b)
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return RationalMatrix(n, b.cols, (x for i in range(n) for x in R[i][n:]))


# ---------------------------------------------------------------------------
# polynomials

class RationalPolynomial:
    """Univariate polynomial in s with Fraction coefficients, ascending powers.

    The zero polynomial has no stored coefficients and degree ``-inf``.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [to_fraction(x) for x in coeffs]
        while c and not c[-1]:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    def __setattr__(self, name, value):
        raise AttributeError("RationalPolynomial is immutable")

    @classmethod
    def constant(cls, c) -> "RationalPolynomial":
        return cls([c])

    @classmethod
    def s(cls) -> "RationalPolynomial":
        return cls([0, 1])

    @property
    def degree(self) -> float | int:
        return len(self.coeffs) - 1 if self.coeffs else -math.inf

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __call__(self, s) -> Fraction:
        s = to_fraction(s)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * s + c
        return acc

    @staticmethod
    def _lift(x) -> "RationalPolynomial":
        return x if isinstance(x, RationalPolynomial) else RationalPolynomial([x])

    def __add__(self, other) -> "RationalPolynomial":
        other = self._lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return RationalPolynomial(self.coeff(k) + other.coeff(k) for k in range(n))

    __radd__ = __add__

    def __neg__(self) -> "RationalPolynomial":
        return RationalPolynomial(-c for c in self.coeffs)

    def __sub__(self, other) -> "RationalPolynomial":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "RationalPolynomial":
        return self._lift(other) - self

    def __mul__(self, other) -> "RationalPolynomial":
        other = self._lift(other)
        if not self.coeffs or not other.coeffs:
            return RationalPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RationalPolynomial(out)

    __rmul__ = __mul__

    def __divmod__(self, other: "RationalPolynomial") -> tuple["RationalPolynomial", "RationalPolynomial"]:
        other = self._lift(other)
        if not other.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dd, lc = len(other.coeffs) - 1, other.coeffs[-1]
        if len(rem) - 1 < dd:
            return RationalPolynomial(), self
        quot = [Fraction(0)] * (len(rem) - dd)
        for k in range(len(rem) - 1 - dd, -1, -1):
            q = rem[k + dd] / lc
            quot[k] = q
            if q:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= q * b
        return RationalPolynomial(quot), RationalPolynomial(rem[:dd])

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalPolynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == RationalPolynomial([other]).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"RationalPolynomial({[_fmt(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            mag = abs(c)
            sym = "" if k == 0 else ("s" if k == 1 else f"s^{k}")
            if not sym:
                body = _fmt(mag)
            elif mag == 1:
                body = sym
            else:
                body = f"{_fmt(mag)}*{sym}"
            terms.append(("-" if c < 0 else "+", body))
        head_sign, head = terms[0]
        out = ("-" if head_sign == "-" else "") + head
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


def interpolate(points: Sequence[tuple]) -> RationalPolynomial:
    """Lagrange interpolation through (x, y) pairs with distinct x."""
    pts = [(to_fraction(x), to_fraction(y)) for x, y in points]
    acc = RationalPolynomial()
    for i, (xi, yi) in enumerate(pts):
        if not yi:
            continue
        basis = RationalPolynomial([1])
        denom = Fraction(1)
        for j, (xj, _) in enumerate(pts):
            if j != i:
                basis = basis * RationalPolynomial([-xj, 1])
                denom *= xi - xj
        acc = acc + basis * (yi / denom)
    return acc


class PolynomialMatrix:
    """Immutable matrix of RationalPolynomial entries."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable):
        entries = tuple(RationalPolynomial._lift(e) if not isinstance(e, RationalPolynomial) else e
                        for e in entries)
        if len(entries) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {len(entries)}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("PolynomialMatrix is immutable")

    @classmethod
    def pencil(cls, E: RationalMatrix, A: RationalMatrix) -> "PolynomialMatrix":
        """The pencil sE - A."""
        if E.shape != A.shape:
            raise ValueError("E and A must have the same shape")
        return cls(E.rows, E.cols, (RationalPolynomial([-a, e]) for e, a in zip(E.entries, A.entries)))

    @classmethod
    def from_constant(cls, M: RationalMatrix) -> "PolynomialMatrix":
        return cls(M.rows, M.cols, (RationalPolynomial([x]) for x in M.entries))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> RationalPolynomial:
        i, j = ij
        return self.entries[i * self.cols + j]

    def evaluate(self, s) -> RationalMatrix:
        return RationalMatrix(self.rows, self.cols, (p(s) for p in self.entries))

    def with_column(self, j: int, b: Sequence[RationalPolynomial]) -> "PolynomialMatrix":
        if len(b) != self.rows:
            raise ValueError("column length mismatch")
        out = list(self.entries)
        for i in range(self.rows):
            out[i * self.cols + j] = RationalPolynomial._lift(b[i])
        return PolynomialMatrix(self.rows, self.cols, out)

    def apply(self, v: Sequence) -> list[RationalPolynomial]:
        """Product with a vector of polynomials (or constants)."""
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        v = [RationalPolynomial._lift(x) for x in v]
        out = []
        for i in range(self.rows):
            acc = RationalPolynomial()
            for j in range(self.cols):
                e = self.entries[i * self.cols + j]
                if e and v[j]:
                    acc = acc + e * v[j]
            out.append(acc)
        return out

    def degree_bound(self) -> int:
        """Upper bound on deg det: sum over columns of the largest entry degree."""
        total = 0
        for j in range(self.cols):
            d = max((self[i, j].degree for i in range(self.rows)), default=-math.inf)
            if d == -math.inf:
                return -1
            total += d
        return total


def det_poly(P: PolynomialMatrix) -> RationalPolynomial:
    """det(P) by exact evaluation at s = 0, 1, ..., d and interpolation.

    d is the column-degree bound of P, which is n for a pencil sE - A.
    """
    if P.rows != P.cols:
        raise ValueError("det_poly needs a square polynomial matrix")
    bound = P.degree_bound()
    if bound < 0:
        return RationalPolynomial()
    return interpolate([(s, det(P.evaluate(s))) for s in range(bound + 1)])


def solve_poly_cramer(P: PolynomialMatrix, b: Sequence) -> list[tuple[RationalPolynomial, RationalPolynomial]]:
    """Solve ``P x = b`` over Q(s) by Cramer's rule.

    Returns one unreduced ``(numerator, denominator)`` pair per component;
    every denominator is det(P).
    """
    if P.rows != P.cols:
        raise ValueError("solve_poly_cramer needs a square polynomial matrix")
    den = det_poly(P)
    if den.is_zero():
        raise SingularMatrixError("det(P) is the zero polynomial")
    b = [RationalPolynomial._lift(x) for x in b]
    return [(det_poly(P.with_column(j, b)), den) for j in range(P.cols)]
