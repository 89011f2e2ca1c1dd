"""Solving ``v_k(x) = c_k`` (k = 1..n) for x, in closed form.

With ``y_k = f_k(x_k)`` and ``d_k = F(c_k)`` the system becomes linear,
``A y = d - z`` with A the all-ones matrix minus the identity and
``z_k = g_k(mean(d))``, ``g_k = f_k ∘ F^{-1}``. Its only possible solution is

    alpha_k = ((n-2)(g_k(d̄) - d_k) + sum_{j≠k} (d_j - g_j(d̄))) / (n-1),

and it is an actual solution exactly when every ``alpha_k`` lies in
``f_k(I)``. Everything here is vectorized over leading axes of ``c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import DomainError, Interval, as_point
from .means import GQAMean
from .balance import substituted_means

FEASIBILITY_TOL = 1e-10
MODULUS_GRID = 4096
MAX_HALVINGS = 60


def offdiag_inverse(n: int) -> np.ndarray:
    """Inverse of the n×n matrix with zero diagonal and ones elsewhere.

    Closed form: ``(2-n)/(n-1)`` on the diagonal, ``1/(n-1)`` off it.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    inv = np.full((n, n), 1.0 / (n - 1))
    np.fill_diagonal(inv, (2.0 - n) / (n - 1))
    return inv


def offdiag_matrix(n: int) -> np.ndarray:
    return np.ones((n, n)) - np.eye(n)


@dataclass(frozen=True)
class ReducedTarget:
    c: np.ndarray
    d: np.ndarray
    d_mean: np.ndarray
    g_at_mean: np.ndarray


@dataclass(frozen=True)
class SystemSolution:
    """Candidate solution of the substituted-mean system.

    ``alpha`` and ``bounds`` are always filled. ``x`` holds the preimages
    ``x_k`` where the instance is feasible and NaN elsewhere; ``failing``
    flags the indices whose ``alpha_k`` left ``f_k(I)``.
    """

    target: ReducedTarget
    alpha: np.ndarray
    y: np.ndarray
    x: np.ndarray
    feasible: np.ndarray
    failing: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    roundtrip_error: np.ndarray

    def failing_indices(self) -> list[int]:
        """1-based failing indices for a single instance."""
        if self.failing.ndim != 1:
            raise ValueError("failing_indices applies to a single instance")
        return [int(k) + 1 for k in np.nonzero(self.failing)[0]]


def _targets(m: GQAMean, c) -> np.ndarray:
    c = as_point(c, m.domain)
    if c.shape[-1] != m.n:
        raise ValueError(f"expected {m.n} targets, got {c.shape[-1]}")
    return c


def reduce_targets(m: GQAMean, c) -> ReducedTarget:
    """``d_k = F(c_k)``, their average, and ``g_k`` at the average."""
    c = _targets(m, c)
    d = m._F(c)
    d_mean = d.mean(axis=-1)
    return ReducedTarget(c, d, d_mean, m.g(d_mean))


def closed_form_alpha(rt: ReducedTarget) -> np.ndarray:
    d, g = rt.d, rt.g_at_mean
    n = d.shape[-1]
    diff = d - g
    others = diff.sum(axis=-1, keepdims=True) - diff
    return ((n - 2) * (g - d) + others) / (n - 1)


def alpha_bounds(m: GQAMean, c) -> tuple[np.ndarray, np.ndarray]:
    """Sandwich ``f_k(c_*) + F(c_*) - F(c^*) <= alpha_k <= f_k(c^*) + F(c^*) - F(c_*)``.

    ``c_*`` and ``c^*`` are the smallest and largest targets.
    """
    c = _targets(m, c)
    c_lo, c_hi = c.min(axis=-1), c.max(axis=-1)
    spread = m._F(c_hi) - m._F(c_lo)
    f_lo = np.stack([g._value(c_lo) for g in m.generators], axis=-1)
    f_hi = np.stack([g._value(c_hi) for g in m.generators], axis=-1)
    return f_lo - spread[..., None], f_hi + spread[..., None]


def solve_reduced(m: GQAMean, rt: ReducedTarget, tol: float = FEASIBILITY_TOL) -> SystemSolution:
    alpha = closed_form_alpha(rt)
    ranges = [g.range() for g in m.generators]
    ok = np.stack([r.contains(alpha[..., k], tol) for k, r in enumerate(ranges)], axis=-1)
    ok = np.asarray(ok, dtype=bool).reshape(alpha.shape)
    feasible = ok.all(axis=-1)
    x = np.full(alpha.shape, np.nan)
    for k, g in enumerate(m.generators):
        sel = feasible
        if np.any(sel):
            x[..., k][sel] = np.asarray(g.generalized_inverse(alpha[..., k][sel], tol))
    lower, upper = alpha_bounds(m, rt.c)
    err = np.full(feasible.shape, np.nan)
    if np.any(feasible):
        v = substituted_means(m, x[feasible])
        err[feasible] = np.abs(v - rt.c[feasible]).max(axis=-1)
    return SystemSolution(rt, alpha, alpha.copy(), x, feasible, ~ok, lower, upper, err)


def solve_main(m: GQAMean, c, tol: float = FEASIBILITY_TOL) -> SystemSolution:
    """Find x with ``v_k(x) = c_k`` for all k, when the closed form is feasible."""
    return solve_reduced(m, reduce_targets(m, c), tol)


def range_margins(m: GQAMean, a: float, b: float) -> list[float | None]:
    """``eps_k = min(f_k(a) - a_k, b_k - f_k(b))``, omitting infinite range ends.

    ``None`` marks a generator whose range is the whole real line.
    """
    out: list[float | None] = []
    for g in m.generators:
        r = g.range()
        terms = []
        if math.isfinite(r.lo):
            terms.append(float(g._value(a)) - r.lo)
        if math.isfinite(r.hi):
            terms.append(r.hi - float(g._value(b)))
        out.append(min(terms) if terms else None)
    return out


def modulus_radius(m: GQAMean, a: float, b: float, eps: float, grid: int = MODULUS_GRID) -> float:
    """Largest step ``h = (b - a) / 2**j`` with ``max |F(t + h) - F(t)| < eps`` on a grid over [a, b - h]."""
    for j in range(1, MAX_HALVINGS + 1):
        h = (b - a) / 2.0**j
        t = np.linspace(a, b - h, grid)
        if np.max(np.abs(m._F(t + h) - m._F(t))) < eps:
            return h
    raise ValueError("no admissible step found; F varies too fast on the bracket")


def solvable_neighborhood(m: GQAMean, p: float, bracket: tuple[float, float]) -> Interval:
    """An open interval around ``p`` on which every target tuple is feasible.

    Parameters
    ----------
    p : float
        Interior point of the domain.
    bracket : (a, b)
        ``a < p < b`` with ``[a, b]`` inside the interior of the domain.

    Returns
    -------
    Interval
        ``(p - r/2, p + r/2)`` clipped to ``(a, b)``, where ``r`` is half the
        grid-estimated modulus radius for ``eps = min_k eps_k``. When every
        generator has range ℝ there is no constraint and ``(a, b)`` is returned.
    """
    a, b = map(float, bracket)
    inner = m.domain.interior()
    if not (a < p < b) or not (inner.contains(a) and inner.contains(b)):
        raise DomainError(f"need a < p < b with [a, b] inside {inner}; got p={p}, bracket={bracket}")
    margins = range_margins(m, a, b)
    defined = [e for e in margins if e is not None]
    if not defined:
        return Interval.open(a, b)
    eps = min(defined)
    if not eps > 0:
        raise ValueError(
            f"degenerate bracket {bracket}: some generator is already at its range "
            "boundary there; choose a wider bracket"
        )
    r = 0.5 * modulus_radius(m, a, b, eps)
    return Interval.open(max(a, p - 0.5 * r), min(b, p + 0.5 * r))
