import pytest

from impulseobs.criteria import build_obs_matrix, check_order_r, is_impulse_observable
from impulseobs.linalg import RationalMatrix, SingularMatrixError, rank
from impulseobs.weierstrass import (
    NotNilpotent,
    WeierstrassData,
    assemble,
    fast_obs_rank,
    fast_rank_condition,
    fast_stack,
    fast_subsystem,
    nilpotency_index,
    random_canonical,
    reduced_form_rank,
)

from conftest import sympy_rank

M = RationalMatrix.from_rows
I = RationalMatrix.identity
Z = RationalMatrix
N2 = M([[0, 1], [0, 0]])
N3 = M([[0, 1, 0], [0, 0, 1], [0, 0, 0]])


def canon(A1, N, C1, C2, T=None, S=None):
    n = A1.rows + N.rows
    return WeierstrassData(A1, N, C1, C2, T or I(n), S or I(n))


def test_assemble_identity_transforms_gives_s2():
    wd = canon(Z(0, 0), N2, Z(1, 0), M([[0, 1]]))
    sys = assemble(wd)
    assert sys.E == N2 and sys.A == I(2) and sys.C == M([[0, 1]])


def test_assemble_block_readoff():
    wd = canon(M([[-1]]), M([[0]]), M([[1]]), M([[1]]))
    sys = assemble(wd)
    assert sys.E == M([[1, 0], [0, 0]])
    assert sys.A == M([[-1, 0], [0, 1]])
    assert sys.C == M([[1, 1]])


def test_assemble_satisfies_decomposition():
    wd = random_canonical(42, 2, 3, 2, 3)
    sys = assemble(wd)
    E0 = RationalMatrix.block_diag(I(2), wd.N)
    A0 = RationalMatrix.block_diag(wd.A1, I(3))
    assert wd.T @ sys.E @ wd.S == E0
    assert wd.T @ sys.A @ wd.S == A0
    assert sys.C @ wd.S == RationalMatrix.hstack(wd.C1, wd.C2)


def test_assemble_rejects_singular_transform():
    wd = canon(Z(0, 0), N2, Z(1, 0), M([[0, 1]]), T=M([[1, 1], [1, 1]]))
    with pytest.raises(SingularMatrixError):
        assemble(wd)


def test_assemble_rejects_non_nilpotent():
    with pytest.raises(NotNilpotent):
        assemble(canon(Z(0, 0), I(2), Z(1, 0), M([[0, 1]])))


def test_transformed_s2_keeps_verdict():
    for seed in range(10):
        t = random_canonical(seed, 0, 2, 1, 1)
        wd = WeierstrassData(Z(0, 0), N2, Z(1, 0), M([[0, 1]]), t.T, t.S)
        sys = assemble(wd)
        assert not is_impulse_observable(sys).verdict
        wd1 = WeierstrassData(Z(0, 0), N2, Z(1, 0), M([[1, 0]]), t.T, t.S)
        assert is_impulse_observable(assemble(wd1)).verdict


def test_nilpotency_index():
    assert nilpotency_index(RationalMatrix.zeros(2, 2)) == 1
    assert nilpotency_index(N2) == 2
    assert nilpotency_index(N3) == 3
    with pytest.raises(NotNilpotent):
        nilpotency_index(I(2))


def test_fast_rank_condition_n3():
    wd = canon(Z(0, 0), N3, Z(1, 0), M([[0, 0, 1]]))
    assert rank(fast_stack(wd.N, wd.C2, 0)) == 1
    assert not fast_rank_condition(wd, 0)


def test_fast_rank_condition_n2():
    assert fast_rank_condition(canon(Z(0, 0), N2, Z(1, 0), M([[1, 0]])), 0)


def test_fast_rank_condition_index_one():
    wd = canon(M([[2]]), RationalMatrix.zeros(2, 2), M([[1]]), M([[5, 7]]))
    assert all(fast_rank_condition(wd, r) for r in range(wd.n))


def test_reduced_form_rank_examples():
    wd = canon(Z(0, 0), N2, Z(1, 0), M([[0, 1]]))
    assert reduced_form_rank(wd, 0) == 2 == fast_obs_rank(wd, 0)
    wd = canon(Z(0, 0), M([[0]]), Z(1, 0), M([[1]]))
    assert reduced_form_rank(wd, 0) == 1 == fast_obs_rank(wd, 0)
    wd = canon(Z(0, 0), N3, Z(1, 0), M([[0, 0, 1]]))
    # C2 N = 0 and N^3 = 0, so the stack vanishes: 3 * 2 + 0
    assert rank(fast_stack(wd.N, wd.C2, 1)) == 0
    assert reduced_form_rank(wd, 1) == 6
    O = build_obs_matrix(fast_subsystem(wd), 3).matrix
    assert O.shape == (11, 9)
    assert sympy_rank(O) == 6 == fast_obs_rank(wd, 1)


def test_random_canonical_deterministic():
    assert random_canonical(7, 2, 3, 2, 3) == random_canonical(7, 2, 3, 2, 3)
    assert random_canonical(7, 2, 3, 2, 3) != random_canonical(8, 2, 3, 2, 3)


def test_random_canonical_pure_slow():
    wd = random_canonical(1, 3, 0, 1, 3)
    sys = assemble(wd)
    assert sys.rank_E == sys.n == 3


def test_random_canonical_structure():
    for seed in range(30):
        wd = random_canonical(seed, 1, 4, 2, 3)
        assert (wd.N ** 4).is_zero()
        assert all(wd.N[i, j] == 0 for i in range(4) for j in range(i + 1))
        assert rank(wd.T) == rank(wd.S) == 5
        assert all(abs(x) <= 3 for x in wd.A1.entries + wd.C1.entries + wd.C2.entries)


def test_random_canonical_bad_dims():
    with pytest.raises(ValueError):
        random_canonical(0, 0, 0, 1, 3)


def test_oracle_agreement_and_boundary_cases():
    for seed in range(60):
        wd = random_canonical(seed, seed % 3, 1 + seed % 4, seed % 3, 2)
        sys = assemble(wd)
        h = wd.h
        verdicts = [fast_rank_condition(wd, r) for r in range(sys.n)]
        assert verdicts == [check_order_r(sys, r).holds for r in range(sys.n)]
        assert len(set(verdicts)) == 1
        for r in range(sys.n):
            assert reduced_form_rank(wd, r) == fast_obs_rank(wd, r)
            if r >= h - 2:
                assert (wd.N ** (r + 2)).is_zero()
