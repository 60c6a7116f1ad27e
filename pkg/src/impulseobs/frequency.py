"""Frequency-domain response X(s) = (sE - A)^{-1} E w and its impulsive part."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .criteria import ImpulseWitness, WitnessError, verify_witness
from .linalg import PolynomialMatrix, RationalPolynomial, solve_poly_cramer, to_fraction
from .system import DescriptorSystem, DimensionMismatch

__all__ = [
    "FrequencySolution",
    "solve_frequency",
    "split_rational",
    "polynomial_witness_from_solution",
    "impulse_order",
]


@dataclass(frozen=True)
class FrequencySolution:
    """X(s) = X_A(s) + X_P(s) with X_A = x_proper_num / denom strictly proper.

    ``denom`` is det(sE - A) made monic; ``q`` is the limit of s X_A(s).
    """

    w: tuple[Fraction, ...]
    x_proper_num: tuple[RationalPolynomial, ...]
    denom: RationalPolynomial
    x_poly: tuple[RationalPolynomial, ...]
    q: tuple[Fraction, ...]

    def numerators(self) -> list[RationalPolynomial]:
        """Numerators of X over the common denominator."""
        return [a + p * self.denom for a, p in zip(self.x_proper_num, self.x_poly)]

    def output_is_zero(self, sys: DescriptorSystem) -> bool:
        """Whether C X(s) vanishes identically."""
        C = PolynomialMatrix.from_constant(sys.C)
        return all(y.is_zero() for y in C.apply(self.numerators()))

    def output(self, sys: DescriptorSystem) -> tuple[list[RationalPolynomial], list[RationalPolynomial]]:
        """C X(s) split as (proper numerators over denom, polynomial part)."""
        C = PolynomialMatrix.from_constant(sys.C)
        return C.apply(self.x_proper_num), C.apply(self.x_poly)

    def residual_is_zero(self, sys: DescriptorSystem) -> bool:
        """Whether (sE - A)(X_A + X_P) = E w after clearing the denominator."""
        lhs = sys.pencil().apply(self.numerators())
        Ew = sys.E.apply(self.w)
        return all((a - self.denom * e).is_zero() for a, e in zip(lhs, Ew))


def split_rational(X: Sequence[tuple[RationalPolynomial, RationalPolynomial]]):
    """Split each fraction num/den into strictly proper part plus polynomial.

    Returns ``(X_A, X_P, q)`` where X_A is a list of (remainder, den) pairs,
    X_P the list of quotients and q_i = lim s * rem_i / den_i.
    """
    proper, poly, q = [], [], []
    for num, den in X:
        num, den = RationalPolynomial._lift(num), RationalPolynomial._lift(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        quot, rem = divmod(num, den)
        proper.append((rem, den))
        poly.append(quot)
        d = len(den.coeffs) - 1
        q.append(rem.coeff(d - 1) / den.leading() if d >= 1 else Fraction(0))
    return proper, poly, q


def solve_frequency(sys: DescriptorSystem, w: Sequence) -> FrequencySolution:
    if len(w) != sys.n:
        raise DimensionMismatch(f"initial state must have length {sys.n}, got {len(w)}")
    w = tuple(to_fraction(x) for x in w)
    Ew = sys.E.apply(w)
    fractions = solve_poly_cramer(sys.pencil(), Ew)
    lc = sys.det_pencil.leading()
    monic = [(num * (1 / lc), den * (1 / lc)) for num, den in fractions]
    proper, poly, q = split_rational(monic)
    return FrequencySolution(
        w=w,
        x_proper_num=tuple(rem for rem, _ in proper),
        denom=monic[0][1],
        x_poly=tuple(poly),
        q=tuple(q),
    )


def impulse_order(x_poly: Sequence[RationalPolynomial]) -> int | None:
    """Degree of the impulse X_P, or None when there is no impulse."""
    degrees = [p.degree for p in x_poly if not p.is_zero()]
    return max(degrees) if degrees else None


def polynomial_witness_from_solution(sys: DescriptorSystem, sol: FrequencySolution) -> ImpulseWitness | None:
    """Turn a zero-output solution with an impulse into the witness (w - q, X_P)."""
    order = impulse_order(sol.x_poly)
    if order is None or not sol.output_is_zero(sys):
        return None
    v = [a - b for a, b in zip(sol.w, sol.q)]
    plain = [[p.coeff(i) for p in sol.x_poly] for i in range(order + 1)]
    witness = ImpulseWitness.from_power_coefficients(v, plain)
    if not verify_witness(sys, witness):
        raise WitnessError("constructed witness fails verification")
    return witness
