"""Real intervals, point tuples and permutations.

All public indices are 1-based. Infinite interval endpoints are stored as
IEEE infinities but never enter arithmetic: every code path that computes
with an endpoint branches on ``math.isfinite`` first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class DomainError(ValueError):
    """A point lies outside the interval a function is defined on."""


class RangeError(ValueError):
    """A value lies outside the range of a function being inverted."""


def _parse_endpoint(value) -> float:
    if value is None:
        raise ValueError("endpoint must be a number or +/-inf")
    if isinstance(value, str):
        key = value.strip().lower()
        if key in ("inf", "+inf", "infinity", "+infinity"):
            return math.inf
        if key in ("-inf", "-infinity"):
            return -math.inf
    return float(value)


@dataclass(frozen=True)
class Interval:
    """A non-trivial real interval, possibly unbounded.

    Parameters
    ----------
    lo, hi : float
        Endpoints; ``-inf`` and ``inf`` are allowed.
    lo_closed, hi_closed : bool
        Whether the endpoint belongs to the interval. An infinite endpoint
        is never closed.
    """

    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        lo, hi = _parse_endpoint(self.lo), _parse_endpoint(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoints must not be NaN")
        if not lo < hi:
            raise ValueError(f"interval needs lo < hi, got lo={lo}, hi={hi}")
        if math.isinf(lo) and self.lo_closed:
            raise ValueError("an infinite lower endpoint cannot be closed")
        if math.isinf(hi) and self.hi_closed:
            raise ValueError("an infinite upper endpoint cannot be closed")

    @classmethod
    def closed(cls, lo: float, hi: float) -> "Interval":
        return cls(lo, hi, True, True)

    @classmethod
    def open(cls, lo: float, hi: float) -> "Interval":
        return cls(lo, hi, False, False)

    @classmethod
    def real_line(cls) -> "Interval":
        return cls(-math.inf, math.inf, False, False)

    @classmethod
    def from_dict(cls, data: dict) -> "Interval":
        lo = _parse_endpoint(data["lo"])
        hi = _parse_endpoint(data["hi"])
        return cls(
            lo,
            hi,
            bool(data.get("lo_closed", math.isfinite(lo))),
            bool(data.get("hi_closed", math.isfinite(hi))),
        )

    def to_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
        }

    @property
    def is_bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    @property
    def length(self) -> float:
        if not self.is_bounded:
            return math.inf
        return self.hi - self.lo

    def interior(self) -> "Interval":
        return Interval(self.lo, self.hi, False, False)

    def contains(self, t, tol: float = 0.0):
        """Membership test, vectorized over ``t``.

        Closed finite endpoints are relaxed by ``tol``; open endpoints are
        compared strictly. Infinite endpoints always pass on their side.
        """
        if tol < 0:
            raise ValueError("tol must be non-negative")
        t = np.asarray(t, dtype=float)
        ok = ~np.isnan(t)
        if math.isfinite(self.lo):
            ok &= (t >= self.lo - tol) if self.lo_closed else (t > self.lo)
        if math.isfinite(self.hi):
            ok &= (t <= self.hi + tol) if self.hi_closed else (t < self.hi)
        return bool(ok) if ok.ndim == 0 else ok

    def subinterval_of(self, other: "Interval") -> bool:
        """True if every point of ``self`` is in ``other``."""
        if self.lo < other.lo or self.hi > other.hi:
            return False
        if self.lo == other.lo and self.lo_closed and not other.lo_closed:
            return False
        if self.hi == other.hi and self.hi_closed and not other.hi_closed:
            return False
        return True

    def clip(self, t):
        """Clip onto the finite closure; open endpoints are nudged inward one ulp."""
        t = np.asarray(t, dtype=float)
        lo, hi = self.lo, self.hi
        if math.isfinite(lo) and not self.lo_closed:
            lo = np.nextafter(lo, math.inf)
        if math.isfinite(hi) and not self.hi_closed:
            hi = np.nextafter(hi, -math.inf)
        return np.clip(t, lo, hi)

    def finite_box(self, span: float = 50.0) -> tuple[float, float]:
        """A finite window [a, b] inside the closure of the interval.

        Infinite sides are truncated ``span`` units away from the finite
        endpoint (or from 0 when both sides are infinite).
        """
        lo, hi = self.lo, self.hi
        if math.isfinite(lo) and math.isfinite(hi):
            return lo, hi
        if math.isfinite(lo):
            return lo, lo + span
        if math.isfinite(hi):
            return hi - span, hi
        return -span, span

    def grid(self, count: int, span: float = 50.0) -> np.ndarray:
        """``count`` equispaced points of the interval's finite window.

        Open endpoints of the window are excluded by spacing the grid
        over ``count + 2`` nodes and dropping the offending ones.
        """
        a, b = self.finite_box(span)
        drop_lo = not (math.isfinite(self.lo) and self.lo_closed)
        drop_hi = not (math.isfinite(self.hi) and self.hi_closed)
        nodes = np.linspace(a, b, count + int(drop_lo) + int(drop_hi))
        if drop_lo:
            nodes = nodes[1:]
        if drop_hi:
            nodes = nodes[:-1]
        return nodes

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


def as_point(x, interval: Interval | None = None, tol: float = 0.0) -> np.ndarray:
    """Validate a point tuple (or a batch of them along the last axis)."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] < 2:
        raise ValueError("a point tuple needs at least 2 coordinates")
    if interval is not None:
        inside = interval.contains(arr, tol)
        if not np.all(inside):
            bad = arr[~np.asarray(inside)]
            raise DomainError(f"coordinates {bad[:5].tolist()} lie outside {interval}")
    return arr


def substitute(x, k: int, t, interval: Interval | None = None) -> np.ndarray:
    """Return ``u_k(x, t)``: a copy of ``x`` with coordinate ``k`` (1-based) set to ``t``.

    Works on batches: ``x`` may have shape ``(..., n)`` and ``t`` shape ``(...)``.
    """
    arr = np.array(x, dtype=float)
    n = arr.shape[-1]
    if not 1 <= k <= n:
        raise IndexError(f"index {k} out of range 1..{n}")
    if interval is not None and not np.all(interval.contains(t)):
        raise DomainError(f"substituted value {t} lies outside {interval}")
    arr[..., k - 1] = t
    return arr


@dataclass(frozen=True)
class Permutation:
    """A bijection of {1, ..., n}, stored as the tuple (σ(1), ..., σ(n))."""

    map: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(v) for v in self.map)
        object.__setattr__(self, "map", m)
        if sorted(m) != list(range(1, len(m) + 1)):
            raise ValueError(f"{m} is not a permutation of 1..{len(m)}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        _check_arity(n)
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def reversal(cls, n: int) -> "Permutation":
        _check_arity(n)
        return cls(tuple(range(n, 0, -1)))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "Permutation":
        _check_arity(n)
        return cls(tuple(int(v) + 1 for v in rng.permutation(n)))

    @property
    def n(self) -> int:
        return len(self.map)

    def __call__(self, k: int) -> int:
        return self.map[k - 1]

    @property
    def indices(self) -> np.ndarray:
        """0-based image array, for fancy indexing."""
        return np.asarray(self.map, dtype=int) - 1

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, v in enumerate(self.map, start=1):
            inv[v - 1] = i
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """``self ∘ other``: k -> self(other(k))."""
        if other.n != self.n:
            raise ValueError("cannot compose permutations of different size")
        return Permutation(tuple(self(other(k)) for k in range(1, self.n + 1)))

    def label(self) -> str:
        return " ".join(str(v) for v in self.map)


def identity_permutation(n: int) -> Permutation:
    return Permutation.identity(n)


def reversal_permutation(n: int) -> Permutation:
    return Permutation.reversal(n)


def _check_arity(n: int) -> None:
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")


def permutation_from_spec(spec, n: int) -> Permutation:
    """Build a permutation from a keyword, an explicit 1-based list, or ``{"random_seed": s}``."""
    if isinstance(spec, str):
        key = spec.strip().lower()
        if key == "identity":
            return Permutation.identity(n)
        if key == "reversal":
            return Permutation.reversal(n)
        raise ValueError(f"unknown permutation keyword {spec!r}")
    if isinstance(spec, dict) and "random_seed" in spec:
        return Permutation.random(n, np.random.default_rng(int(spec["random_seed"])))
    if isinstance(spec, Sequence):
        perm = Permutation(tuple(spec))
        if perm.n != n:
            raise ValueError(f"permutation has size {perm.n}, expected {n}")
        return perm
    raise ValueError(f"cannot interpret {spec!r} as a permutation")
