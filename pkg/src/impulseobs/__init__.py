"""Impulse observability of descriptor systems E x' = A x, y = C x.

Decides the question directly from (E, A, C) with the rank test on the
block matrix O_k(E, A, C), builds explicit unobservable impulses, and
cross-checks against systems assembled from Weierstrass canonical data.
"""
from .criteria import (
    BlockObservabilityMatrix,
    CriterionInconsistency,
    ImpulseWitness,
    ObservabilityReport,
    Strategy,
    build_obs_matrix,
    check_order_r,
    find_witness,
    is_impulse_observable,
    kernel_witnesses,
    order_reduce,
    verify_witness,
)
from .frequency import FrequencySolution, impulse_order, polynomial_witness_from_solution, solve_frequency
from .linalg import PolynomialMatrix, RationalMatrix, RationalPolynomial
from .system import DescriptorSystem, DimensionMismatch, IrregularPencil, is_standard, validate

__version__ = "0.1.0"
