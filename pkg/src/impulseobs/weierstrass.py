"""Descriptor systems built from Weierstrass canonical data.

Given slow dynamics A1, a nilpotent N, output blocks C1, C2 and invertible
T, S, the assembled system satisfies

    T (sE - A) S = diag(sI - A1, sN - I),    C S = [C1 C2].

Because the canonical data is known, the fast-subsystem rank condition on
(N, C2) gives an independent answer to check the intrinsic criterion.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .criteria import build_obs_matrix
from .linalg import RationalMatrix, SingularMatrixError, rank, solve_invertible
from .system import DescriptorSystem, validate

__all__ = [
    "NotNilpotent",
    "WeierstrassData",
    "assemble",
    "nilpotency_index",
    "fast_stack",
    "fast_rank_condition",
    "reduced_form_rank",
    "fast_subsystem",
    "fast_obs_rank",
    "random_canonical",
]


class NotNilpotent(ValueError):
    pass


def nilpotency_index(N: RationalMatrix) -> int:
    """Smallest h >= 1 with N^h = 0."""
    if N.rows != N.cols:
        raise ValueError("nilpotency index needs a square matrix")
    P = N
    for h in range(1, max(N.rows, 1) + 1):
        if P.is_zero():
            return h
        P = P @ N
    raise NotNilpotent("matrix is not nilpotent")


@dataclass(frozen=True)
class WeierstrassData:
    A1: RationalMatrix
    N: RationalMatrix
    C1: RationalMatrix
    C2: RationalMatrix
    T: RationalMatrix
    S: RationalMatrix

    @property
    def n1(self) -> int:
        return self.A1.rows

    @property
    def n2(self) -> int:
        return self.N.rows

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def m(self) -> int:
        return self.C2.rows

    @property
    def h(self) -> int:
        return nilpotency_index(self.N)


def assemble(wd: WeierstrassData) -> DescriptorSystem:
    """E = T^-1 diag(I, N) S^-1, A = T^-1 diag(A1, I) S^-1, C = [C1 C2] S^-1."""
    n1, n2, n = wd.n1, wd.n2, wd.n
    if wd.A1.shape != (n1, n1) or wd.N.shape != (n2, n2):
        raise ValueError("A1 and N must be square")
    if wd.C1.shape != (wd.m, n1) or wd.C2.cols != n2:
        raise ValueError("C1, C2 shapes do not match A1, N")
    if wd.T.shape != (n, n) or wd.S.shape != (n, n):
        raise ValueError(f"T and S must be {n}x{n}")
    nilpotency_index(wd.N)
    I = RationalMatrix.identity(n)
    try:
        Tinv = solve_invertible(wd.T, I)
        Sinv = solve_invertible(wd.S, I)
    except SingularMatrixError:
        raise SingularMatrixError("T and S must be invertible") from None
    E0 = RationalMatrix.block_diag(RationalMatrix.identity(n1), wd.N)
    A0 = RationalMatrix.block_diag(wd.A1, RationalMatrix.identity(n2))
    C0 = RationalMatrix.hstack(wd.C1, wd.C2)
    return validate(Tinv @ E0 @ Sinv, Tinv @ A0 @ Sinv, C0 @ Sinv)


def fast_stack(N: RationalMatrix, C2: RationalMatrix, r: int) -> RationalMatrix:
    """[N^{r+2}; C2 N; C2 N^2; ...; C2 N^{r+1}]."""
    blocks = [N ** (r + 2)]
    P = N
    for _ in range(r + 1):
        blocks.append(C2 @ P)
        P = P @ N
    return RationalMatrix.vstack(*blocks)


def fast_rank_condition(wd: WeierstrassData, r: int) -> bool:
    if not 0 <= r <= wd.n - 1:
        raise ValueError(f"order r={r} outside 0..{wd.n - 1}")
    return rank(fast_stack(wd.N, wd.C2, r)) == rank(wd.N)


def reduced_form_rank(wd: WeierstrassData, r: int) -> int:
    """n2 (r + 1) + rank of the fast stack, the rank of O_{r+2}(N, I, C2)."""
    if not 0 <= r <= wd.n - 1:
        raise ValueError(f"order r={r} outside 0..{wd.n - 1}")
    return wd.n2 * (r + 1) + rank(fast_stack(wd.N, wd.C2, r))


def fast_subsystem(wd: WeierstrassData) -> DescriptorSystem:
    """The fast part (N, I, C2) as a descriptor system."""
    return validate(wd.N, RationalMatrix.identity(wd.n2), wd.C2)


def fast_obs_rank(wd: WeierstrassData, r: int) -> int:
    """rank O_{r+2}(N, I, C2), computed directly."""
    if wd.n2 == 0:
        return 0
    return rank(build_obs_matrix(fast_subsystem(wd), r + 2).matrix)


def _unimodular(rng: random.Random, n: int, steps: int) -> RationalMatrix:
    a = [[int(i == j) for j in range(n)] for i in range(n)]
    if n < 2:
        return RationalMatrix.from_rows(a)
    for _ in range(steps):
        kind = rng.random()
        i, j = rng.sample(range(n), 2)
        if kind < 0.2:
            a[i], a[j] = a[j], a[i]
        elif kind < 0.3:
            a[i] = [-x for x in a[i]]
        else:
            c = rng.choice((-1, 1))
            a[i] = [x + c * y for x, y in zip(a[i], a[j])]
    return RationalMatrix.from_rows(a)


def _dense(rng: random.Random, rows: int, cols: int, bound: int) -> RationalMatrix:
    return RationalMatrix(rows, cols, [rng.randint(-bound, bound) for _ in range(rows * cols)])


def random_canonical(seed, n1: int, n2: int, m: int, entry_bound: int,
                     transform_steps: int | None = None) -> WeierstrassData:
    """Deterministic random canonical data.

    A1, C1, C2 are dense with entries in [-entry_bound, entry_bound], N is
    strictly upper triangular, and T, S are products of unimodular
    elementary matrices.
    """
    if n1 < 0 or n2 < 0 or m < 0 or n1 + n2 < 1:
        raise ValueError("need n1, n2, m >= 0 and n1 + n2 >= 1")
    if entry_bound < 0:
        raise ValueError("entry_bound must be >= 0")
    rng = random.Random(seed)
    n = n1 + n2
    steps = 2 * n if transform_steps is None else transform_steps
    A1 = _dense(rng, n1, n1, entry_bound)
    N = RationalMatrix(n2, n2, [rng.randint(-entry_bound, entry_bound) if j > i else 0
                               for i in range(n2) for j in range(n2)])
    C1 = _dense(rng, m, n1, entry_bound)
    C2 = _dense(rng, m, n2, entry_bound)
    T = _unimodular(rng, n, steps)
    S = _unimodular(rng, n, steps)
    return WeierstrassData(A1, N, C1, C2, T, S)
