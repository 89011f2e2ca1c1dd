"""Means of n variables: generalized quasi-arithmetic, min/max mixtures, coordinates.

All means evaluate batches: an argument of shape ``(..., n)`` yields
values of shape ``(...)``.
"""

from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np

from .domain import Interval, RangeError, as_point
from .generators import DEFAULT_TOL, Generator, GeneratorRange, bisect_leftmost, bracket

STRICT_GRID = 512
STRICT_MARGIN = 1e-14


class Mean:
    """Evaluation contract shared by every mean: arity, domain, evaluate."""

    n: int
    domain: Interval

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x):
        x = as_point(x, self.domain)
        if x.shape[-1] != self.n:
            raise ValueError(f"expected {self.n} coordinates, got {x.shape[-1]}")
        out = self.evaluate(x)
        return float(out) if np.ndim(out) == 0 else out

    def label(self) -> str:
        return type(self).__name__


class GQAMean(Mean):
    """``M_f(x) = F^{-1}(f_1(x_1) + ... + f_n(x_n))`` with ``F = f_1 + ... + f_n``.

    Parameters
    ----------
    generators : sequence of Generator
        At least two generators on one common domain, all monotone in the
        same sense. Decreasing tuples are negated, which leaves the mean
        unchanged.
    tol : float
        Mixed tolerance used by :meth:`F_inverse`.

    Raises
    ------
    ValueError
        If the domains differ, the senses are mixed, or ``F`` fails the
        strict-increase check on a 512-point grid, i.e. the generators
        are simultaneously constant somewhere.
    """

    def __init__(self, generators: Sequence[Generator], tol: float = DEFAULT_TOL):
        gens = list(generators)
        if len(gens) < 2:
            raise ValueError("a GQA mean needs at least two generators")
        domain = gens[0].domain
        if any(g.domain != domain for g in gens):
            raise ValueError("all generators must share one domain")
        senses = {g.increasing for g in gens}
        if len(senses) > 1:
            raise ValueError("generators must be monotone in the same sense")
        if senses == {False}:
            gens = [g.negated() for g in gens]
        self.generators: tuple[Generator, ...] = tuple(gens)
        self.n = len(gens)
        self.domain = domain
        self.tol = tol
        self._check_strict()

    def _check_strict(self) -> None:
        # increments are summed per generator without the additive offsets,
        # so a large constant cannot swamp a tiny but genuine rise
        grid = self.domain.grid(STRICT_GRID)
        with np.errstate(all="ignore"):
            base = [g.scale * g._base(grid) for g in self.generators]
        gaps = sum(np.diff(b) for b in base)
        scale = sum(np.maximum(np.abs(b[:-1]), np.abs(b[1:])) for b in base)
        ok = np.isfinite(gaps) & np.isfinite(scale)
        gaps, scale = gaps[ok], scale[ok]
        if not np.all(gaps > STRICT_MARGIN * scale) or not np.all(gaps > 0):
            raise ValueError(
                "F = f_1 + ... + f_n is not strictly increasing; the generators are "
                "simultaneously constant on a subinterval"
            )

    def _F(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        total = np.zeros(t.shape)
        for g in self.generators:
            total = total + g._value(t)
        return total

    def F_eval(self, t):
        """``F(t) = sum_k f_k(t)``."""
        t = np.asarray(t, dtype=float)
        if not np.all(self.domain.contains(t, self.tol)):
            raise ValueError(f"argument outside {self.domain}")
        out = self._F(self.domain.clip(t))
        return float(out) if out.ndim == 0 else out

    def F_range(self) -> GeneratorRange:
        parts = [g.range() for g in self.generators]
        return GeneratorRange(
            math.fsum(r.lo for r in parts) if all(math.isfinite(r.lo) for r in parts) else -math.inf,
            math.fsum(r.hi for r in parts) if all(math.isfinite(r.hi) for r in parts) else math.inf,
            all(r.lo_attained for r in parts),
            all(r.hi_attained for r in parts),
        )

    def F_inverse(self, u, tol: float | None = None):
        """The unique ``x`` in the domain with ``F(x) = u``, by bracketed bisection."""
        tol = self.tol if tol is None else tol
        u = np.asarray(u, dtype=float)
        rng = self.F_range()
        if not np.all(rng.within(u, tol)):
            raise RangeError(f"value outside F(I) = [{rng.lo}, {rng.hi}]")
        u = np.clip(u, rng.lo, rng.hi)
        lo, hi, lo_closed = bracket(self._F, u, self.domain)
        x = self.domain.clip(bisect_leftmost(self._F, u, lo, hi, lo_closed))
        return float(x) if x.ndim == 0 else x

    def g(self, u) -> np.ndarray:
        """``g_k(u) = f_k(F^{-1}(u))`` for every k, stacked on the last axis."""
        t = np.asarray(self.F_inverse(u))
        return np.stack([gen._value(t) for gen in self.generators], axis=-1)

    def terms(self, x: np.ndarray) -> np.ndarray:
        """``f_k(x_k)`` for every k, shape ``(..., n)``."""
        return np.stack([g._value(x[..., k]) for k, g in enumerate(self.generators)], axis=-1)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        # The mean lies in [min x, max x]; bisect there instead of the whole domain.
        s = self.terms(x).sum(axis=-1)
        return bisect_leftmost(self._F, s, x.min(axis=-1), x.max(axis=-1), True)

    def label(self) -> str:
        return "gqa[" + "; ".join(g.label() for g in self.generators) + "]"


class MinMaxMean(Mean):
    """``M(x, y) = t min(x, y) + (1 - t) max(x, y)`` for ``t`` in [0, 1]."""

    def __init__(self, t: float, domain: Interval):
        if not 0.0 <= t <= 1.0:
            raise ValueError("t must lie in [0, 1]")
        self.t = float(t)
        self.n = 2
        self.domain = domain

    def evaluate(self, x):
        return self.t * x.min(axis=-1) + (1.0 - self.t) * x.max(axis=-1)

    def label(self) -> str:
        return f"minmax(t={self.t:g})"


class CoordinateMean(Mean):
    """The projection ``(x, y) -> x`` (index 1) or ``(x, y) -> y`` (index 2)."""

    def __init__(self, index: int, domain: Interval):
        if index not in (1, 2):
            raise ValueError("coordinate index must be 1 or 2")
        self.index = index
        self.n = 2
        self.domain = domain

    def evaluate(self, x):
        return x[..., self.index - 1].copy()

    def label(self) -> str:
        return f"coordinate({self.index})"


def quasi_arithmetic(generator: Generator, n: int) -> GQAMean:
    return GQAMean([generator] * n)


def arithmetic(n: int, domain: Interval) -> GQAMean:
    return quasi_arithmetic(Generator.identity(domain), n)


def geometric(n: int, domain: Interval) -> GQAMean:
    return quasi_arithmetic(Generator.logarithm(domain), n)


def mean_eval(m: Mean, x):
    return m(x)


def is_reflexive(m: Mean, grid, tol: float = 1e-10) -> bool:
    grid = np.asarray(grid, dtype=float)
    diag = np.repeat(grid[:, None], m.n, axis=1)
    return bool(np.all(np.abs(m(diag) - grid) <= tol))


def is_symmetric(m: Mean, samples, tol: float = 1e-10) -> bool:
    """True iff permuting the coordinates of each sample moves the mean by at most ``tol``."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    base = np.asarray(m(samples))
    for perm in itertools.permutations(range(m.n)):
        if np.any(np.abs(m(samples[:, list(perm)]) - base) > tol):
            return False
    return True


def is_strict(m: Mean, samples, tol: float = 0.0) -> bool:
    """Strict internality at samples with pairwise distinct coordinates (reported, not asserted)."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    srt = np.sort(samples, axis=1)
    distinct = np.all(np.diff(srt, axis=1) > 0, axis=1)
    vals = np.asarray(m(samples[distinct]))
    sub = samples[distinct]
    return bool(np.all((vals > sub.min(axis=1) + tol) & (vals < sub.max(axis=1) - tol)))


def is_quasi_arithmetic_exact(m: GQAMean) -> bool:
    """Structural test: every generator has the same family, parameters and affine part."""
    first = m.generators[0]
    return all(g == first for g in m.generators[1:])
