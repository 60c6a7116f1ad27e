import itertools
from fractions import Fraction

import pytest

from impulseobs.linalg import RationalMatrix
from impulseobs.system import validate

N2 = [[0, 1], [0, 0]]
I2 = [[1, 0], [0, 1]]
N3 = [[0, 1, 0], [0, 0, 1], [0, 0, 0]]
I3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


@pytest.fixture
def S1():
    return validate(N2, I2, [[1, 0]])


@pytest.fixture
def S2():
    return validate(N2, I2, [[0, 1]])


@pytest.fixture
def N3sys():
    return validate(N3, I3, [[0, 0, 1]])


def cofactor_det(rows):
    """Laplace expansion along the first row; independent of the Bareiss kernel."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(rows[0][0])
    total = Fraction(0)
    for j, a in enumerate(rows[0]):
        if a:
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            total += (-1) ** j * Fraction(a) * cofactor_det(minor)
    return total


def minor_rank(M: RationalMatrix) -> int:
    """Largest k with a nonzero k x k minor (brute force, small matrices only)."""
    rows = M.to_rows()
    for k in range(min(M.rows, M.cols), 0, -1):
        for ri in itertools.combinations(range(M.rows), k):
            for ci in itertools.combinations(range(M.cols), k):
                if cofactor_det([[rows[i][j] for j in ci] for i in ri]):
                    return k
    return 0


def sympy_rank(M: RationalMatrix) -> int:
    import sympy

    if M.rows == 0 or M.cols == 0:
        return 0
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in M.to_rows()]).rank()


_acceptance_lines: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
