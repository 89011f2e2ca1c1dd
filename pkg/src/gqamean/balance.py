"""Balance residuals and sampled balance scans.

For a mean M, a point x and a permutation σ, put u = M(x). The point
satisfies the σ-balance equation when

    M(M(u_σ(1)(x, u)), ..., M(u_σ(n)(x, u))) = u,

where u_k(x, u) is x with its k-th coordinate replaced by u. The inner
means M(u_k(x, M(x))) are the substituted means v_k(x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .csvio import numbered
from .domain import Interval, Permutation, as_point
from .means import GQAMean, Mean

BALANCED = "balanced_within_tol"
VIOLATED = "violated"
DEFAULT_TOL_ZERO = 1e-9


def _checked(m: Mean, x) -> np.ndarray:
    x = as_point(x, m.domain)
    if x.shape[-1] != m.n:
        raise ValueError(f"expected {m.n} coordinates, got {x.shape[-1]}")
    return x


def _check_sigma(m: Mean, sigma: Permutation) -> None:
    if sigma.n != m.n:
        raise ValueError(f"permutation of size {sigma.n} for a mean of {m.n} variables")


def _substituted(m: Mean, x: np.ndarray, u: np.ndarray) -> np.ndarray:
    cols = []
    for k in range(m.n):
        y = x.copy()
        y[..., k] = u
        cols.append(m.evaluate(y))
    return np.stack(cols, axis=-1)


def substituted_means(m: Mean, x) -> np.ndarray:
    """All ``v_k(x)``, stacked on the last axis."""
    x = _checked(m, x)
    return _substituted(m, x, m.evaluate(x))


def v_k(m: Mean, x, k: int):
    """``v_k(x) = M(x_1, ..., x_{k-1}, M(x), x_{k+1}, ..., x_n)`` with 1-based ``k``."""
    if not 1 <= k <= m.n:
        raise IndexError(f"index {k} out of range 1..{m.n}")
    out = substituted_means(m, x)[..., k - 1]
    return float(out) if out.ndim == 0 else out


def balance_residual(m: Mean, sigma: Permutation, x):
    """Signed residual ``M(v_σ(1), ..., v_σ(n)) - M(x)``; vectorized over leading axes."""
    _check_sigma(m, sigma)
    x = _checked(m, x)
    u = m.evaluate(x)
    w = _substituted(m, x, u)[..., sigma.indices]
    out = m.evaluate(w) - u
    return float(out) if out.ndim == 0 else out


def f_space_residual(m: GQAMean, sigma: Permutation, x):
    """``sum_j f_j(v_σ(j)(x)) - sum_j f_j(x_j)``.

    Has the sign of :func:`balance_residual` and vanishes together with it,
    because F is strictly increasing.
    """
    _check_sigma(m, sigma)
    x = _checked(m, x)
    w = _substituted(m, x, m.evaluate(x))[..., sigma.indices]
    out = m.terms(w).sum(axis=-1) - m.terms(x).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def aumann_residual(m: Mean, s, t):
    """``M(M(s, M(s,t)), M(M(s,t), t)) - M(s,t)`` for a mean of two variables."""
    if m.n != 2:
        raise ValueError("Aumann's equation needs a mean of two variables")
    x = _checked(m, np.stack(np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float)), axis=-1))
    s, t = x[..., 0], x[..., 1]
    u = m.evaluate(x)
    left = m.evaluate(np.stack([s, u], axis=-1))
    right = m.evaluate(np.stack([u, t], axis=-1))
    out = m.evaluate(np.stack([left, right], axis=-1)) - u
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Sampler:
    """Sample tuples from a box inside the domain.

    ``mode="random"`` draws ``count`` tuples uniformly per coordinate with
    ``numpy.random.default_rng(seed)``; ``mode="grid"`` takes the full
    product of ``per_axis`` equispaced points. ``box`` truncates the
    domain and is mandatory when the domain is unbounded.
    """

    mode: str = "random"
    count: int = 10_000
    per_axis: int = 50
    seed: int | None = 0
    box: tuple[float, float] | None = None

    def __post_init__(self):
        if self.mode not in ("random", "grid"):
            raise ValueError(f"sampler mode must be 'random' or 'grid', got {self.mode!r}")
        if self.mode == "random" and self.seed is None:
            raise ValueError("random sampling needs a seed")
        if self.box is not None:
            object.__setattr__(self, "box", (float(self.box[0]), float(self.box[1])))

    def bounds(self, domain: Interval) -> tuple[float, float]:
        if self.box is None:
            if not domain.is_bounded:
                raise ValueError(f"domain {domain} is unbounded; give the sampler a truncation box")
            return domain.lo, domain.hi
        a, b = self.box
        if not (a < b and math.isfinite(a) and math.isfinite(b)):
            raise ValueError(f"bad sampling box {self.box}")
        if a < domain.lo or b > domain.hi:
            raise ValueError(f"sampling box {self.box} leaves the domain {domain}")
        return a, b

    def axis(self, domain: Interval) -> np.ndarray:
        a, b = self.bounds(domain)
        pts = np.linspace(a, b, self.per_axis)
        return pts[domain.contains(pts)]

    def points(self, domain: Interval, n: int) -> np.ndarray:
        if self.mode == "grid":
            axis = self.axis(domain)
            mesh = np.meshgrid(*([axis] * n), indexing="ij")
            return np.stack([g.ravel() for g in mesh], axis=-1)
        a, b = self.bounds(domain)
        rng = np.random.default_rng(self.seed)
        pts = rng.uniform(a, b, size=(self.count, n))
        return domain.clip(pts)


@dataclass(frozen=True)
class BalanceReport:
    sigma: Permutation
    n: int
    samples_evaluated: int
    max_abs_residual: float
    argmax_point: tuple[float, ...]
    argmax_residual: float
    tol_zero: float
    verdict: str

    @property
    def balanced(self) -> bool:
        return self.verdict == BALANCED

    @staticmethod
    def csv_header(n: int) -> list[str]:
        return ["sigma", "n", "samples", "max_abs_residual", *numbered("argmax", n), "verdict"]

    def csv_row(self) -> list:
        return [self.sigma.label(), self.n, self.samples_evaluated, self.max_abs_residual,
                *self.argmax_point, self.verdict]


def _better(cand_val: float, cand_pt: np.ndarray, best_val: float, best_pt) -> bool:
    if best_pt is None or cand_val > best_val:
        return True
    return cand_val == best_val and tuple(cand_pt) < tuple(best_pt)


def scan_balance(m: Mean, sigma: Permutation, sampler: Sampler,
                 tol_zero: float = DEFAULT_TOL_ZERO, chunk: int = 65_536) -> BalanceReport:
    """Evaluate the balance residual on every sampled tuple and summarize.

    The witness is the sample of largest absolute residual, ties broken by
    the lexicographically smallest point, so the report does not depend on
    the chunking.
    """
    _check_sigma(m, sigma)
    pts = sampler.points(m.domain, m.n)
    best_val, best_pt, best_res = -1.0, None, 0.0
    for start in range(0, len(pts), chunk):
        block = pts[start:start + chunk]
        res = np.asarray(balance_residual(m, sigma, block)).reshape(-1)
        if np.isnan(res).any():
            raise RuntimeError(f"NaN balance residual for {m.label()}")
        mag = np.abs(res)
        top = mag.max()
        ties = np.nonzero(mag == top)[0]
        order = np.lexsort(block[ties].T[::-1])
        i = ties[order[0]]
        if _better(top, block[i], best_val, best_pt):
            best_val, best_pt, best_res = float(top), block[i].copy(), float(res[i])
    verdict = VIOLATED if best_val > tol_zero else BALANCED
    return BalanceReport(sigma, m.n, len(pts), best_val, tuple(float(v) for v in best_pt),
                         best_res, tol_zero, verdict)
