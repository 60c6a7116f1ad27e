"""Randomized cross-validation suites shared by ``selftest`` and the test suite.

Every suite is deterministic in its seed. A suite stops at the first
counterexample and records the offending system so it can be replayed.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .criteria import (
    build_obs_matrix,
    check_order_r,
    find_witness,
    is_impulse_observable,
    kernel_witnesses,
    order_reduce,
    verify_witness,
)
from .floatrank import float_rank
from .frequency import impulse_order, polynomial_witness_from_solution, solve_frequency
from .linalg import RationalMatrix, rank
from .system import DescriptorSystem, IrregularPencil, validate
from .weierstrass import (
    WeierstrassData,
    assemble,
    fast_obs_rank,
    fast_rank_condition,
    random_canonical,
    reduced_form_rank,
)

log = logging.getLogger(__name__)

__all__ = [
    "SuiteResult",
    "Counterexample",
    "fixture_systems",
    "random_system",
    "random_systems",
    "random_canonicals",
    "suite_equivalence",
    "suite_weierstrass",
    "suite_lemma_b",
    "suite_witness",
    "suite_order_reduction",
    "suite_frequency",
    "suite_float",
    "run_all",
]


class Counterexample(Exception):
    def __init__(self, message: str, system: DescriptorSystem | None = None, **context):
        super().__init__(message)
        self.system = system
        self.context = context


@dataclass
class SuiteResult:
    name: str
    trials: int = 0
    checks: int = 0
    failure: str | None = None
    counterexample: DescriptorSystem | None = None
    stats: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failure is None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = "".join(f" {k}={v}" for k, v in self.stats.items())
        msg = f"[{status}] {self.name}: {self.trials} trials, {self.checks} checks{extra}"
        if self.failure:
            msg += f" -- {self.failure}"
        return msg


def _run(name: str, body: Callable[[SuiteResult], None]) -> SuiteResult:
    res = SuiteResult(name)
    try:
        body(res)
    except Counterexample as exc:
        res.failure = str(exc)
        res.counterexample = exc.system
        log.error("%s: %s", name, exc)
    return res


# ---------------------------------------------------------------------------
# generators

def fixture_systems() -> dict[str, DescriptorSystem]:
    N2 = [[0, 1], [0, 0]]
    I2 = [[1, 0], [0, 1]]
    N3 = [[0, 1, 0], [0, 0, 1], [0, 0, 0]]
    I3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    return {
        "S1": validate(N2, I2, [[1, 0]]),
        "S2": validate(N2, I2, [[0, 1]]),
        "N3": validate(N3, I3, [[0, 0, 1]]),
    }


def _draw(rng: random.Random, rows: int, cols: int, bound: int, zero_prob: float) -> list[list[int]]:
    return [[0 if rng.random() < zero_prob else rng.randint(-bound, bound) for _ in range(cols)]
            for _ in range(rows)]


def random_system(rng: random.Random, max_n: int = 5, max_m: int = 3, bound: int = 5) -> DescriptorSystem | None:
    """One random integer system with entries in [-bound, bound], or None if irregular.

    Draws mix three shapes so that both verdicts occur often: dense pairs
    with a rank-deficient E, sparse pairs, and small canonical forms pushed
    through unimodular transforms (kept only if the entries stay in range).
    """
    n = rng.randint(1, max_n)
    m = rng.randint(0, max_m)
    kind = rng.random()
    if kind < 0.45:
        n1 = rng.randint(0, n - 1)
        wd = random_canonical(rng.getrandbits(64), n1, n - n1, m, 2, transform_steps=rng.randint(0, n))
        if rng.random() < 0.5 and m:
            # sparsify the fast output block so unobservable impulses show up
            keep = rng.random()
            C2 = RationalMatrix.from_rows([[x if rng.random() < keep else 0 for x in r] for r in wd.C2.to_rows()],
                                          cols=wd.n2)
            wd = WeierstrassData(wd.A1, wd.N, wd.C1, C2, wd.T, wd.S)
        sys = assemble(wd)
        if all(abs(x) <= bound for M in (sys.E, sys.A, sys.C) for x in M.entries):
            return sys
        kind = 0.0
    if kind < 0.75:
        E = _draw(rng, n, n, bound, 0.2)
        for i in rng.sample(range(n), rng.randint(1, n)):
            if rng.random() < 0.5 or n == 1:
                E[i] = [0] * n
            else:
                E[i] = list(E[rng.randrange(n)])
        A = _draw(rng, n, n, bound, 0.2)
        C = _draw(rng, m, n, bound, 0.3)
    else:
        E = _draw(rng, n, n, bound, 0.6)
        A = _draw(rng, n, n, bound, 0.6)
        C = _draw(rng, m, n, bound, 0.6)
    try:
        return validate(E, A, C if m else RationalMatrix(0, n))
    except IrregularPencil:
        return None


def random_systems(count: int, seed, max_n: int = 5, max_m: int = 3, bound: int = 5,
                   stats: dict | None = None) -> Iterator[DescriptorSystem]:
    """``count`` regular systems; irregular draws are discarded and counted."""
    rng = random.Random(seed)
    made = 0
    while made < count:
        sys = random_system(rng, max_n, max_m, bound)
        if sys is None:
            if stats is not None:
                stats["discarded"] = stats.get("discarded", 0) + 1
            continue
        made += 1
        yield sys


def random_canonicals(count: int, seed, max_n: int = 6, max_m: int = 3, bound: int = 3) -> Iterator[WeierstrassData]:
    rng = random.Random(seed)
    for _ in range(count):
        n = rng.randint(1, max_n)
        n2 = rng.randint(0, n)
        m = rng.randint(0, max_m)
        wd = random_canonical(rng.getrandbits(64), n - n2, n2, m, bound)
        if m and rng.random() < 0.4:
            C2 = RationalMatrix.from_rows([[x if rng.random() < 0.4 else 0 for x in r] for r in wd.C2.to_rows()],
                                          cols=n2)
            wd = WeierstrassData(wd.A1, wd.N, wd.C1, C2, wd.T, wd.S)
        yield wd


# ---------------------------------------------------------------------------
# suites

def suite_equivalence(trials: int = 500, seed=0, max_n: int = 5) -> SuiteResult:
    """check_order_r gives one boolean for every r in 0..n-1."""
    def body(res: SuiteResult):
        neg = 0
        for sys in random_systems(trials, seed, max_n=max_n, stats=res.stats):
            res.trials += 1
            verdicts = [check_order_r(sys, r).holds for r in range(sys.n)]
            res.checks += len(verdicts)
            if len(set(verdicts)) != 1:
                raise Counterexample(f"verdicts differ across r: {verdicts}", sys)
            neg += not verdicts[0]
        res.stats["negative"] = neg
    return _run("equivalence across orders", body)


def suite_weierstrass(trials: int = 200, seed=1, max_n: int = 6) -> SuiteResult:
    """Intrinsic criterion on the assembled system versus the (N, C2) condition."""
    def body(res: SuiteResult):
        neg = 0
        for wd in random_canonicals(trials, seed, max_n=max_n):
            res.trials += 1
            sys = assemble(wd)
            for r in range(sys.n):
                res.checks += 1
                intrinsic = check_order_r(sys, r).holds
                if intrinsic != fast_rank_condition(wd, r):
                    raise Counterexample(f"r={r}: intrinsic={intrinsic} disagrees with fast condition", sys)
            neg += not check_order_r(sys, 0).holds
        res.stats["negative"] = neg
    return _run("weierstrass cross-validation", body)


def suite_lemma_b(trials: int = 200, seed=1, max_n: int = 6) -> SuiteResult:
    """n2 (r+1) + rank(fast stack) equals rank O_{r+2}(N, I, C2)."""
    def body(res: SuiteResult):
        for wd in random_canonicals(trials, seed, max_n=max_n):
            res.trials += 1
            for r in range(wd.n):
                res.checks += 1
                a, b = reduced_form_rank(wd, r), fast_obs_rank(wd, r)
                if a != b:
                    raise Counterexample(f"r={r}: reduced form rank {a} != direct rank {b}", assemble(wd))
    return _run("reduced-form rank identity", body)


def _suite_systems(trials: int, seed, canon_trials: int, canon_seed) -> Iterator[DescriptorSystem]:
    yield from fixture_systems().values()
    yield from random_systems(trials, seed)
    for wd in random_canonicals(canon_trials, canon_seed):
        yield assemble(wd)


def suite_witness(trials: int = 500, seed=0, canon_trials: int = 200, canon_seed=1) -> SuiteResult:
    """Negative verdicts produce verified witnesses; positive ones produce none up to r = n."""
    def body(res: SuiteResult):
        for sys in _suite_systems(trials, seed, canon_trials, canon_seed):
            res.trials += 1
            report = is_impulse_observable(sys)
            if report.verdict:
                for r in range(sys.n + 1):
                    res.checks += 1
                    if find_witness(sys, r, extended=True) is not None:
                        raise Counterexample(f"observable system has a witness at r={r}", sys)
            else:
                for r in range(sys.n):
                    res.checks += 1
                    w = find_witness(sys, r)
                    if w is None or not verify_witness(sys, w):
                        raise Counterexample(f"no valid witness at r={r} despite negative verdict", sys)
    return _run("witness soundness", body)


def suite_order_reduction(trials: int = 500, seed=0, canon_trials: int = 200, canon_seed=1) -> SuiteResult:
    """Every kernel witness of order >= 1 reduces to a verified order-0 witness with E p_r = 0."""
    def body(res: SuiteResult):
        reduced = 0
        for sys in _suite_systems(trials, seed, canon_trials, canon_seed):
            res.trials += 1
            if check_order_r(sys, 0).holds:
                continue
            for r in range(sys.n):
                for w in kernel_witnesses(sys, r):
                    if w.order < 1:
                        continue
                    res.checks += 1
                    if not verify_witness(sys, w):
                        raise Counterexample("kernel witness fails verification", sys)
                    w0 = order_reduce(sys, w)
                    if w0.order != 0 or not verify_witness(sys, w0) or any(sys.E.apply(w.coeffs[-1])):
                        raise Counterexample(f"order reduction failed for order {w.order}", sys)
                    reduced += 1
        res.stats["reduced"] = reduced
    return _run("order reduction", body)


def suite_frequency(trials: int = 100, seed=2) -> SuiteResult:
    """Exact residual of X(s), and (w - q, X_P) is a witness whenever C X = 0 and X_P != 0."""
    def check(res: SuiteResult, sys: DescriptorSystem, w) -> None:
        res.checks += 1
        sol = solve_frequency(sys, w)
        if not sol.residual_is_zero(sys):
            raise Counterexample(f"residual nonzero for w={w}", sys)
        if any(p.degree >= d for p, d in [(a, sol.denom.degree) for a in sol.x_proper_num] if not p.is_zero()):
            raise Counterexample("proper part is not strictly proper", sys)
        if sol.output_is_zero(sys) and impulse_order(sol.x_poly) is not None:
            res.stats["bridged"] = res.stats.get("bridged", 0) + 1
            w_ = polynomial_witness_from_solution(sys, sol)
            if w_ is None or not verify_witness(sys, w_):
                raise Counterexample(f"bridge witness invalid for w={w}", sys)

    def body(res: SuiteResult):
        rng = random.Random(seed)
        fixtures = list(fixture_systems().values())
        randoms = list(random_systems(trials, rng.getrandbits(64)))
        for sys in fixtures + randoms:
            res.trials += 1
            probes = [[rng.randint(-5, 5) for _ in range(sys.n)] for _ in range(2)]
            probes += [[int(i == j) for j in range(sys.n)] for i in range(sys.n)]
            for r in range(sys.n):
                for wit in kernel_witnesses(sys, r):
                    probes.append(list(wit.v))
            for w in probes:
                check(res, sys, w)
    return _run("frequency-solution bridge", body)


def suite_float(trials: int = 500, seed=0, threshold: float = 0.99) -> SuiteResult:
    """Float SVD rank versus exact rank on every O_k of the equivalence suite."""
    def body(res: SuiteResult):
        agree = 0
        for sys in random_systems(trials, seed):
            res.trials += 1
            for r in range(sys.n):
                M = build_obs_matrix(sys, r + 2).matrix
                res.checks += 1
                exact, approx = rank(M), float_rank(M)
                if exact == approx:
                    agree += 1
                else:
                    log.info("float rank %d != exact rank %d on a %dx%d O_k", approx, exact, M.rows, M.cols)
        res.stats["agree"] = agree
        res.stats["disagree"] = res.checks - agree
        if res.checks and agree / res.checks < threshold:
            raise Counterexample(f"float agreement {agree}/{res.checks} below {threshold:.0%}")
    return _run("float backend agreement", body)


def run_all(trials: int = 500, max_n: int = 5, seed: int = 0) -> list[SuiteResult]:
    canon = max(trials * 2 // 5, 0)
    return [
        suite_equivalence(trials, seed, max_n=max_n),
        suite_weierstrass(canon, seed + 1, max_n=max_n + 1),
        suite_lemma_b(canon, seed + 1, max_n=max_n + 1),
        suite_witness(trials, seed, canon, seed + 1),
        suite_order_reduction(trials, seed, canon, seed + 1),
        suite_frequency(trials // 5, seed + 2),
        suite_float(trials, seed),
    ]
