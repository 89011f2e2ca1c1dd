"""Generalized quasi-arithmetic means and their σ-balance property."""

from .balance import (
    BalanceReport,
    Sampler,
    aumann_residual,
    balance_residual,
    f_space_residual,
    scan_balance,
    substituted_means,
    v_k,
)
from .characterize import (
    Classification,
    ShiftProfile,
    classify,
    estimate_shift_profile,
    necessary_condition_residual,
)
from .domain import (
    DomainError,
    Interval,
    Permutation,
    RangeError,
    identity_permutation,
    reversal_permutation,
    substitute,
)
from .generators import Generator, GeneratorRange
from .inverse_system import (
    ReducedTarget,
    SystemSolution,
    alpha_bounds,
    offdiag_inverse,
    reduce_targets,
    solvable_neighborhood,
    solve_main,
    solve_reduced,
)
from .means import (
    CoordinateMean,
    GQAMean,
    Mean,
    MinMaxMean,
    arithmetic,
    geometric,
    is_quasi_arithmetic_exact,
    is_reflexive,
    is_symmetric,
    mean_eval,
    quasi_arithmetic,
)

__all__ = [
    "BalanceReport",
    "Classification",
    "CoordinateMean",
    "DomainError",
    "GQAMean",
    "Generator",
    "GeneratorRange",
    "Interval",
    "Mean",
    "MinMaxMean",
    "Permutation",
    "RangeError",
    "ReducedTarget",
    "Sampler",
    "ShiftProfile",
    "SystemSolution",
    "alpha_bounds",
    "arithmetic",
    "aumann_residual",
    "balance_residual",
    "classify",
    "estimate_shift_profile",
    "f_space_residual",
    "geometric",
    "identity_permutation",
    "is_quasi_arithmetic_exact",
    "is_reflexive",
    "is_symmetric",
    "mean_eval",
    "necessary_condition_residual",
    "offdiag_inverse",
    "quasi_arithmetic",
    "reduce_targets",
    "reversal_permutation",
    "scan_balance",
    "solvable_neighborhood",
    "solve_main",
    "solve_reduced",
    "substitute",
    "substituted_means",
    "v_k",
]

__version__ = "0.1.0"
