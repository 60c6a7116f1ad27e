"""Validated descriptor systems E x' = A x, y = C x."""
from __future__ import annotations

from dataclasses import dataclass, field

from .linalg import PolynomialMatrix, RationalMatrix, RationalPolynomial, det_poly, rank

__all__ = [
    "DescriptorError",
    "DimensionMismatch",
    "IrregularPencil",
    "DescriptorSystem",
    "as_matrix",
    "validate",
    "is_standard",
]


class DescriptorError(ValueError):
    pass


class DimensionMismatch(DescriptorError):
    pass


class IrregularPencil(DescriptorError):
    pass


def as_matrix(M, cols: int | None = None) -> RationalMatrix:
    """Accept a RationalMatrix or nested rows of exact rationals."""
    if isinstance(M, RationalMatrix):
        return M
    try:
        return RationalMatrix.from_rows(M, cols=cols)
    except ValueError as exc:
        raise DimensionMismatch(str(exc)) from None


@dataclass(frozen=True)
class DescriptorSystem:
    E: RationalMatrix
    A: RationalMatrix
    C: RationalMatrix
    det_pencil: RationalPolynomial = field(compare=False)
    rank_E: int = field(compare=False)

    @property
    def n(self) -> int:
        return self.E.rows

    @property
    def m(self) -> int:
        return self.C.rows

    def pencil(self) -> PolynomialMatrix:
        return PolynomialMatrix.pencil(self.E, self.A)


def validate(E, A, C) -> DescriptorSystem:
    """Check shapes and regularity of sE - A and return the system.

    ``C`` may have zero rows; pass ``RationalMatrix(0, n)`` (or an empty list,
    which is read as 0 x n).
    """
    E = as_matrix(E)
    A = as_matrix(A)
    n = E.rows
    if isinstance(C, RationalMatrix):
        pass
    elif len(C) == 0:
        C = RationalMatrix(0, n)
    else:
        C = as_matrix(C)
    if n == 0:
        raise DimensionMismatch("empty state space (n = 0)")
    if E.cols != n:
        raise DimensionMismatch(f"E must be square, got {E.rows}x{E.cols}")
    if A.shape != (n, n):
        raise DimensionMismatch(f"A must be {n}x{n}, got {A.rows}x{A.cols}")
    if C.cols != n:
        raise DimensionMismatch(f"C must have {n} columns, got {C.cols}")
    d = det_poly(PolynomialMatrix.pencil(E, A))
    if d.is_zero():
        raise IrregularPencil("det(sE - A) is identically zero")
    return DescriptorSystem(E, A, C, d, rank(E))


def is_standard(sys: DescriptorSystem) -> bool:
    """True when E is invertible; such systems have no impulsive behaviour."""
    return sys.rank_E == sys.n
