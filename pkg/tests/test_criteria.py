import random
from fractions import Fraction

import pytest

from impulseobs.criteria import (
    CriterionInconsistency,
    ImpulseWitness,
    OrderOutOfRange,
    Strategy,
    WitnessError,
    build_obs_matrix,
    check_order_r,
    find_witness,
    is_impulse_observable,
    kernel_witnesses,
    order_reduce,
    verify_witness,
)
from impulseobs.linalg import RationalMatrix, nullspace_basis, rank
from impulseobs.suites import random_systems
from impulseobs.system import validate

from conftest import I2, N2, minor_rank, sympy_rank


def test_obs_matrix_k2_layout(S1):
    O = build_obs_matrix(S1, 2).matrix
    E, A, C = S1.E, S1.A, S1.C
    expected = RationalMatrix.vstack(
        RationalMatrix.hstack(E, A),
        RationalMatrix.hstack(RationalMatrix.zeros(2, 2), E),
        RationalMatrix.hstack(RationalMatrix.zeros(1, 2), C),
    )
    assert O == expected
    assert O.shape == (5, 4)


def test_obs_matrix_k3_size(S1):
    assert build_obs_matrix(S1, 3).matrix.shape == (8, 6)


def test_obs_matrix_k3_blocks(N3sys):
    O = build_obs_matrix(N3sys, 3).matrix
    n = 3

    def blk(bi, bj, h=n):
        r0 = bi * n if bi < 3 else 3 * n + (bi - 3)
        return O.submatrix(range(r0, r0 + h), range(bj * n, bj * n + n))

    assert blk(0, 0) == N3sys.E and blk(0, 1) == N3sys.A and blk(0, 2).is_zero()
    assert blk(1, 1) == N3sys.E and blk(1, 2) == N3sys.A and blk(1, 0).is_zero()
    assert blk(2, 2) == N3sys.E and blk(2, 0).is_zero() and blk(2, 1).is_zero()
    assert blk(3, 1, 1) == N3sys.C and blk(3, 0, 1).is_zero() and blk(3, 2, 1).is_zero()
    assert blk(4, 2, 1) == N3sys.C and blk(4, 1, 1).is_zero()


def test_obs_matrix_standard_system():
    sys = validate(I2, [[1, 2], [3, 4]], [[1, 1]])
    O = build_obs_matrix(sys, 2).matrix
    assert rank(O) == 4


def test_obs_matrix_rejects_k1(S1):
    with pytest.raises(ValueError):
        build_obs_matrix(S1, 1)


def test_obs_matrix_size_invariant():
    for sys in random_systems(40, seed=5):
        for k in range(2, sys.n + 3):
            assert build_obs_matrix(sys, k).matrix.shape == (k * sys.n + (k - 1) * sys.m, k * sys.n)


# fixed instances, each rank also computed by an independent oracle

def test_check_s1(S1):
    assert check_order_r(S1, 0) == (True, 3, 3)
    assert minor_rank(build_obs_matrix(S1, 2).matrix) == 3


def test_check_s2(S2):
    assert check_order_r(S2, 0) == (False, 2, 3)
    assert minor_rank(build_obs_matrix(S2, 2).matrix) == 2


def test_check_n3(N3sys):
    assert check_order_r(N3sys, 1) == (False, 6, 8)
    O = build_obs_matrix(N3sys, 3).matrix
    assert sympy_rank(O) == 6
    # kernel dimension 3: p1 = (a,0,0), p0 = (b,-a,0), p_-1 = (c,-b,a)
    assert len(nullspace_basis(O)) == 3


def test_check_order_range(S1):
    with pytest.raises(OrderOutOfRange):
        check_order_r(S1, 2)
    with pytest.raises(OrderOutOfRange):
        check_order_r(S1, -1)
    assert check_order_r(S1, 2, extended=True).holds


def test_no_outputs_degrades(S1):
    sys = validate(N2, I2, [])
    report = is_impulse_observable(sys)
    assert not report.verdict
    assert build_obs_matrix(sys, 3).matrix.shape == (6, 6)
    index_one = validate([[1, 0], [0, 0]], I2, [])
    assert is_impulse_observable(index_one).verdict


# verdicts

@pytest.mark.parametrize("strategy", [Strategy.FIRST_ORDER_ONLY, Strategy.ALL_ORDERS, Strategy.single(1)])
def test_standard_system_observable(strategy):
    sys = validate(I2, [[0, 1], [-2, -3]], [[0, 1]])
    report = is_impulse_observable(sys, strategy)
    assert report.verdict and report.witness is None


def test_verdict_s2_all(S2):
    report = is_impulse_observable(S2, Strategy.ALL_ORDERS)
    assert not report.verdict
    assert [(row.r, row.rank, row.required) for row in report.rank_table] == [(0, 2, 3), (1, 4, 5)]
    assert report.witness.order == 0
    assert verify_witness(S2, report.witness)


def test_verdict_s1_all(S1):
    report = is_impulse_observable(S1, Strategy.ALL_ORDERS)
    assert report.verdict
    assert all(row.rank == row.required for row in report.rank_table)


def test_verdict_parallel_matches_serial():
    for sys in random_systems(30, seed=9):
        a = is_impulse_observable(sys)
        b = is_impulse_observable(sys, workers=4)
        assert a == b


def test_strategy_parse():
    assert Strategy.parse("first") == Strategy.FIRST_ORDER_ONLY
    assert Strategy.parse("all") == Strategy.ALL_ORDERS
    assert Strategy.parse("r=3") == Strategy.single(3)
    assert str(Strategy.single(3)) == "r=3"
    with pytest.raises(ValueError):
        Strategy.parse("some")


def test_inconsistency_is_raised(monkeypatch, S1):
    import impulseobs.criteria as crit
    from impulseobs.criteria import OrderCheck

    def fake(sys, r, extended=False):
        return OrderCheck(r == 0, 0, 0)

    monkeypatch.setattr(crit, "check_order_r", fake)
    with pytest.raises(CriterionInconsistency):
        crit.is_impulse_observable(S1, Strategy.ALL_ORDERS)


# witnesses

def test_witness_s2(S2):
    w = find_witness(S2, 0)
    assert w.v == (0, -1)
    assert w.coeffs == ((1, 0),)
    assert w.order == 0


def test_witness_s1_none(S1):
    assert find_witness(S1, 0) is None
    kernel = nullspace_basis(build_obs_matrix(S1, 2).matrix)
    # kernel is exactly {((beta, 0), (0, 0))}
    assert [x.col(0) for x in kernel] == [[1, 0, 0, 0]]


def test_witness_n3_order_one(N3sys):
    ws = kernel_witnesses(N3sys, 1)
    top = max(ws, key=lambda w: w.order)
    assert top.v == (0, 0, 1)
    assert top.coeffs == ((0, -1, 0), (1, 0, 0))
    assert [str(p) for p in top.polynomial()] == ["-s", "-1", "0"]
    assert verify_witness(N3sys, top)


def test_find_witness_is_first_basis_vector(N3sys):
    # the first qualifying RREF basis vector has a zero p_1 and trims to order 0
    w = find_witness(N3sys, 1)
    assert w.order == 0
    assert w == kernel_witnesses(N3sys, 1)[0]
    assert verify_witness(N3sys, w)


def test_verify_rejects_bad_witness(S2):
    assert verify_witness(S2, ImpulseWitness((0, -1), ((1, 0),)))
    assert not verify_witness(S2, ImpulseWitness((0, 0), ((1, 0),)))
    assert not verify_witness(S2, ImpulseWitness((0, 0), ((0, 0),)))
    assert not verify_witness(S2, ImpulseWitness((0, -1, 0), ((1, 0, 0),)))


def test_power_coefficient_round_trip():
    w = ImpulseWitness((1, 2), ((1, 0), (3, Fraction(1, 2)), (0, 5)))
    plain = w.power_coefficients()
    assert plain == ((1, 0), (-3, Fraction(-1, 2)), (0, 5))
    assert ImpulseWitness.from_power_coefficients(w.v, plain) == w


def test_order_reduce_n3(N3sys):
    w = ImpulseWitness((0, 0, 1), ((0, -1, 0), (1, 0, 0)))
    w0 = order_reduce(N3sys, w)
    assert w0.v == (0, -1, 0)
    assert w0.coeffs == ((1, 0, 0),)
    assert not any(N3sys.E.apply(w0.coeffs[0]))


def test_order_reduce_rejects_order_zero(S2):
    with pytest.raises(WitnessError):
        order_reduce(S2, ImpulseWitness((0, -1), ((1, 0),)))


def test_order_reduce_rejects_corrupt(N3sys):
    with pytest.raises(WitnessError):
        order_reduce(N3sys, ImpulseWitness((0, 0, 1), ((0, -1, 0), (0, 1, 0))))


# properties over random systems

def test_equivalence_and_witness_properties():
    for sys in random_systems(120, seed=21):
        holds = [check_order_r(sys, r).holds for r in range(sys.n)]
        assert len(set(holds)) == 1
        for r in range(sys.n):
            nullity = len(nullspace_basis(build_obs_matrix(sys, r + 2).matrix))
            w = find_witness(sys, r)
            assert nullity >= sys.n - sys.rank_E
            assert (nullity == sys.n - sys.rank_E) == (w is None) == holds[r]
            if w is not None:
                assert verify_witness(sys, w) and w.order <= r
        if holds[0]:
            assert find_witness(sys, sys.n, extended=True) is None


def test_rank_matches_sympy_on_random_obs_matrices():
    rng = random.Random(4)
    systems = list(random_systems(25, seed=33))
    for sys in systems:
        r = rng.randrange(sys.n)
        M = build_obs_matrix(sys, r + 2).matrix
        assert rank(M) == sympy_rank(M)
