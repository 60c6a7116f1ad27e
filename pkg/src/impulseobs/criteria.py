"""Impulse observability from the block matrix O_k(E, A, C).

O_k has k block columns and 2k - 1 block rows::

    [ E  A          ]
    [    E  .       ]
    [       .  A    ]
    [          E    ]
    [ 0  C          ]
    [       .  .    ]
    [          0  C ]

A kernel vector (p_{-1}, p_0, ..., p_r) of O_{r+2} is exactly a pair
(v, P(s)) with v = p_{-1} and P(s) = sum_i (-s)^i p_i solving

    (sE - A) P(s) = E v,    C P(s) = 0.

The system has no such pair with P != 0 and deg P <= r iff
rank O_{r+2} = n (r + 1) + rank E, and the answer is the same for every
r in 0..n-1.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .linalg import PolynomialMatrix, RationalMatrix, RationalPolynomial, nullspace_basis, rank
from .system import DescriptorSystem

__all__ = [
    "OrderOutOfRange",
    "CriterionInconsistency",
    "WitnessError",
    "BlockObservabilityMatrix",
    "ImpulseWitness",
    "OrderCheck",
    "RankRow",
    "Strategy",
    "ObservabilityReport",
    "build_obs_matrix",
    "check_order_r",
    "is_impulse_observable",
    "find_witness",
    "kernel_witnesses",
    "order_reduce",
    "verify_witness",
]


class OrderOutOfRange(ValueError):
    pass


class CriterionInconsistency(AssertionError):
    """Two orders r disagreed. This is a defect, never a verdict."""


class WitnessError(ValueError):
    pass


@dataclass(frozen=True)
class BlockObservabilityMatrix:
    k: int
    matrix: RationalMatrix


@dataclass(frozen=True)
class ImpulseWitness:
    """An unobservable impulse P(s) together with its initial state v.

    ``coeffs`` holds p_0 .. p_r with P(s) = sum_i (-s)^i p_i.
    """

    v: tuple[Fraction, ...]
    coeffs: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(Fraction(x) for x in self.v))
        object.__setattr__(self, "coeffs", tuple(tuple(Fraction(x) for x in p) for p in self.coeffs))
        if not self.coeffs:
            raise WitnessError("a witness needs at least one coefficient vector")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def power_coefficients(self) -> tuple[tuple[Fraction, ...], ...]:
        """Coefficients c_i of P(s) = sum_i s^i c_i, i.e. c_i = (-1)^i p_i."""
        return tuple(tuple(-x if i % 2 else x for x in p) for i, p in enumerate(self.coeffs))

    def polynomial(self) -> list[RationalPolynomial]:
        """P(s) as one RationalPolynomial per state component."""
        plain = self.power_coefficients()
        return [RationalPolynomial(c[j] for c in plain) for j in range(len(self.v))]

    @classmethod
    def from_power_coefficients(cls, v: Sequence, plain: Sequence[Sequence]) -> "ImpulseWitness":
        return cls(tuple(v), tuple(tuple(-Fraction(x) if i % 2 else Fraction(x) for x in c)
                                   for i, c in enumerate(plain)))


class OrderCheck(NamedTuple):
    holds: bool
    rank_found: int
    rank_required: int


class RankRow(NamedTuple):
    r: int
    rank: int
    required: int


@dataclass(frozen=True)
class Strategy:
    """Which orders r to test: ``first`` (r = 0), ``all`` (r = 0..n-1) or a single r."""

    kind: str
    r: int | None = None

    def __post_init__(self):
        if self.kind not in ("first", "all", "single"):
            raise ValueError(f"unknown strategy {self.kind!r}")
        if (self.kind == "single") != (self.r is not None):
            raise ValueError("only the single strategy carries an order")

    @classmethod
    def single(cls, r: int) -> "Strategy":
        return cls("single", r)

    @classmethod
    def parse(cls, text: str) -> "Strategy":
        text = text.strip()
        if text in ("first", "all"):
            return cls(text)
        if text.startswith("r="):
            return cls.single(int(text[2:]))
        raise ValueError(f"strategy must be first, all or r=K; got {text!r}")

    def __str__(self) -> str:
        return f"r={self.r}" if self.kind == "single" else self.kind

    def orders(self, n: int) -> list[int]:
        if self.kind == "first":
            return [0]
        if self.kind == "all":
            return list(range(n))
        return [self.r]


Strategy.FIRST_ORDER_ONLY = Strategy("first")
Strategy.ALL_ORDERS = Strategy("all")


@dataclass(frozen=True)
class ObservabilityReport:
    verdict: bool
    rank_table: tuple[RankRow, ...]
    witness: ImpulseWitness | None
    strategy: Strategy


def build_obs_matrix(sys: DescriptorSystem, k: int) -> BlockObservabilityMatrix:
    if k < 2:
        raise ValueError(f"O_k needs k >= 2, got {k}")
    n, m = sys.n, sys.m
    grid: list[list[RationalMatrix | None]] = []
    for j in range(k):
        row = [None] * k
        row[j] = sys.E
        if j + 1 < k:
            row[j + 1] = sys.A
        grid.append(row)
    for j in range(k - 1):
        row = [None] * k
        row[j + 1] = sys.C
        grid.append(row)
    M = RationalMatrix.block(grid, [n] * k + [m] * (k - 1), [n] * k)
    return BlockObservabilityMatrix(k, M)


def _check_range(sys: DescriptorSystem, r: int, extended: bool) -> None:
    top = sys.n if extended else sys.n - 1
    if not 0 <= r <= top:
        raise OrderOutOfRange(f"order r={r} outside 0..{top}")


def check_order_r(sys: DescriptorSystem, r: int, *, extended: bool = False) -> OrderCheck:
    """Rank test for 'no unobservable impulse of order <= r'.

    ``extended`` admits r = n, one past the bound that already decides the
    question for a regular pencil.
    """
    _check_range(sys, r, extended)
    found = rank(build_obs_matrix(sys, r + 2).matrix)
    required = sys.n * (r + 1) + sys.rank_E
    return OrderCheck(found == required, found, required)


def _split_kernel_vector(x: RationalMatrix, n: int, r: int) -> tuple[tuple, list[tuple]]:
    vals = x.col(0)
    v = tuple(vals[:n])
    tail = [tuple(vals[n * (i + 1):n * (i + 2)]) for i in range(r + 1)]
    return v, tail


def _trimmed(v, tail) -> ImpulseWitness | None:
    top = max((i for i, p in enumerate(tail) if any(p)), default=None)
    if top is None:
        return None
    return ImpulseWitness(v, tuple(tail[:top + 1]))


def kernel_witnesses(sys: DescriptorSystem, r: int, *, extended: bool = False) -> list[ImpulseWitness]:
    """Every kernel basis vector of O_{r+2} with a nonzero tail, as a witness.

    Basis order is the deterministic RREF order; each witness is trimmed to
    its true degree.
    """
    _check_range(sys, r, extended)
    out = []
    for x in nullspace_basis(build_obs_matrix(sys, r + 2).matrix):
        w = _trimmed(*_split_kernel_vector(x, sys.n, r))
        if w is not None:
            out.append(w)
    return out


def find_witness(sys: DescriptorSystem, r: int, *, extended: bool = False) -> ImpulseWitness | None:
    """First unobservable impulse of order <= r in RREF basis order, or None."""
    _check_range(sys, r, extended)
    for x in nullspace_basis(build_obs_matrix(sys, r + 2).matrix):
        w = _trimmed(*_split_kernel_vector(x, sys.n, r))
        if w is not None:
            return w
    return None


def verify_witness(sys: DescriptorSystem, w: ImpulseWitness) -> bool:
    """Check (sE - A) P(s) = E v and C P(s) = 0 as polynomial identities."""
    n = sys.n
    if len(w.v) != n or any(len(p) != n for p in w.coeffs):
        return False
    if not any(w.coeffs[-1]):
        return False
    P = w.polynomial()
    Ev = sys.E.apply(w.v)
    lhs = sys.pencil().apply(P)
    if any(a != RationalPolynomial([b]) for a, b in zip(lhs, Ev)):
        return False
    out = PolynomialMatrix.from_constant(sys.C).apply(P)
    return all(y.is_zero() for y in out)


def order_reduce(sys: DescriptorSystem, w: ImpulseWitness) -> ImpulseWitness:
    """Collapse an order-r witness (r >= 1) to the order-0 witness (p_{r-1}, p_r)."""
    r = w.order
    if r < 1:
        raise WitnessError("order-0 witness cannot be reduced further")
    p_prev, p_top = w.coeffs[r - 1], w.coeffs[r]
    reduced = ImpulseWitness(p_prev, (p_top,))
    # (sE - A) p_r = E p_{r-1}, C p_r = 0, and the s-coefficient forces E p_r = 0
    if any(sys.E.apply(p_top)) or not verify_witness(sys, reduced):
        raise WitnessError("reduced witness fails verification; input witness is corrupt")
    return reduced


def is_impulse_observable(sys: DescriptorSystem, strategy: Strategy = Strategy.ALL_ORDERS,
                          *, workers: int | None = None) -> ObservabilityReport:
    """Evaluate the rank criterion at the orders chosen by ``strategy``.

    With the ``all`` strategy every r is evaluated and the results must
    agree; a disagreement raises CriterionInconsistency. A negative verdict
    carries the minimal-order witness.
    """
    orders = strategy.orders(sys.n)
    for r in orders:
        _check_range(sys, r, False)
    if workers and len(orders) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            checks = list(pool.map(lambda r: check_order_r(sys, r), orders))
    else:
        checks = [check_order_r(sys, r) for r in orders]
    table = tuple(RankRow(r, c.rank_found, c.rank_required) for r, c in zip(orders, checks))
    outcomes = {c.holds for c in checks}
    if len(outcomes) > 1:
        raise CriterionInconsistency(f"rank criterion disagrees across orders: {table}")
    verdict = outcomes.pop()
    witness = None
    if not verdict:
        for r in range(max(orders) + 1):
            witness = find_witness(sys, r)
            if witness is not None:
                break
        if witness is None or not verify_witness(sys, witness):
            raise CriterionInconsistency("negative verdict without a valid witness")
    return ObservabilityReport(verdict, table, witness, strategy)
