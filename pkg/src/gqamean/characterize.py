"""Shift-constant detection and the quasi-arithmetic classifier.

A GQA mean is quasi-arithmetic exactly when its generators differ by
constants, ``f_k = f_1 + D_k``. :func:`classify` measures that directly
and, independently, scans the balance residual; the two verdicts are
expected to agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .balance import BalanceReport, Sampler, _checked, _substituted, scan_balance
from .domain import Permutation
from .means import GQAMean

QUASI_ARITHMETIC = "quasi_arithmetic"
NOT_QUASI_ARITHMETIC = "not_quasi_arithmetic"
DEFAULT_TOL_SHIFT = 1e-8
SHIFT_GRID = 512


def necessary_condition_residual(m: GQAMean, sigma: Permutation, x):
    """``sum_j sum_{k≠j} [f_j(w_j) - f_k(w_j)]`` with ``w_j = v_σ(j)(x)``.

    Evaluated as ``sum_j [n f_j(w_j) - F(w_j)]``. Vanishes at every x when
    the mean is σ-balanced.
    """
    x = _checked(m, x)
    w = _substituted(m, x, m.evaluate(x))[..., sigma.indices]
    own = m.terms(w)
    total = np.stack([m._F(w[..., j]) for j in range(m.n)], axis=-1)
    out = (m.n * own - total).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ShiftProfile:
    D: tuple[float, ...]
    max_deviation: float
    argmax: float
    grid_size: int
    scale: float = 1.0


def estimate_shift_profile(m: GQAMean, grid, normalize: bool = False) -> ShiftProfile:
    """Fit ``f_k ≈ f_1 + D_k`` on ``grid`` and report the worst misfit.

    ``D_k`` is the grid average of ``f_k - f_1``. With ``normalize`` every
    generator is divided by the common factor ``(F(b) - F(a)) / n`` over the
    grid's span, which leaves the mean unchanged and makes the deviation
    scale free; ``D`` is still reported in the generators' own units.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("shift estimation needs a grid of at least two points")
    vals = np.stack([g._value(grid) for g in m.generators], axis=0)
    scale = 1.0
    if normalize:
        scale = float((m._F(grid.max()) - m._F(grid.min())) / m.n)
        vals = vals / scale
    diffs = vals - vals[0]
    D = diffs.mean(axis=1)
    dev = np.abs(diffs - D[:, None])
    flat = int(np.argmax(dev))
    k, i = np.unravel_index(flat, dev.shape)
    return ShiftProfile(
        D=tuple(float(v) * scale for v in D),
        max_deviation=float(dev[k, i]),
        argmax=float(grid[i]),
        grid_size=int(grid.size),
        scale=scale,
    )


@dataclass(frozen=True)
class Classification:
    label: str
    verdict: str
    shift: ShiftProfile
    balance: BalanceReport

    @property
    def agree(self) -> bool:
        return (self.verdict == QUASI_ARITHMETIC) == self.balance.balanced

    @property
    def anomaly(self) -> bool:
        return not self.agree


def classify(m: GQAMean, sigma: Permutation, sampler: Sampler,
             tol_shift: float = DEFAULT_TOL_SHIFT, tol_zero: float = 1e-9,
             grid_size: int = SHIFT_GRID) -> Classification:
    """Shift verdict from a normalized shift profile, checked against a balance scan."""
    a, b = sampler.bounds(m.domain)
    grid = np.linspace(a, b, grid_size)
    grid = grid[m.domain.contains(grid)]
    profile = estimate_shift_profile(m, grid, normalize=True)
    verdict = QUASI_ARITHMETIC if profile.max_deviation <= tol_shift else NOT_QUASI_ARITHMETIC
    report = scan_balance(m, sigma, sampler, tol_zero)
    return Classification(m.label(), verdict, profile, report)
