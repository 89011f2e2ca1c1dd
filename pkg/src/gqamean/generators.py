"""Generating functions: parametric families, numeric ranges, and inversion.

Every generator is a continuous monotone map on an :class:`Interval`,
written as ``scale * base(t) + offset`` where ``base`` is non-decreasing.
A negative ``scale`` gives a decreasing generator; tuples of those are
flipped to the non-decreasing orientation when a mean is built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .domain import DomainError, Interval, RangeError

FAMILIES = ("identity", "affine", "power", "logarithm", "exponential", "monotone_table")

DEFAULT_TOL = 1e-12
MAX_BISECTIONS = 200
MAX_DOUBLINGS = 60


def bisect_leftmost(func: Callable, y, lo, hi, lo_closed=True, max_iter: int = MAX_BISECTIONS):
    """Smallest ``x`` in ``[lo, hi]`` with ``func(x) >= y``, for non-decreasing ``func``.

    Vectorized over ``y``, ``lo`` and ``hi``. ``func`` is only evaluated at
    interior midpoints (and at ``lo`` where ``lo_closed``), so it never
    sees an open endpoint. Iterates until the bracket can no longer be
    split in floating point or ``max_iter`` is reached; the right end of
    the final bracket is returned.
    """
    y, lo, hi = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (y, lo, hi)))
    shape = y.shape
    y, lo, hi = y.ravel().copy(), lo.ravel().copy(), hi.ravel().copy()
    lo_closed = np.broadcast_to(np.asarray(lo_closed, dtype=bool), shape).ravel()

    at_lo = np.zeros(y.shape, dtype=bool)
    if lo_closed.any():
        idx = np.nonzero(lo_closed)
        at_lo[idx] = func(lo[idx]) >= y[idx]

    active = ~at_lo
    for _ in range(max_iter):
        mid = lo + 0.5 * (hi - lo)
        active &= (mid > lo) & (mid < hi)
        if not active.any():
            break
        idx = np.nonzero(active)
        hit = func(mid[idx]) >= y[idx]
        hi[idx] = np.where(hit, mid[idx], hi[idx])
        lo[idx] = np.where(hit, lo[idx], mid[idx])
    return np.where(at_lo, lo, hi).reshape(shape)


def bracket(func: Callable, y, interval: Interval):
    """Finite search brackets ``(lo, hi, lo_closed)`` for :func:`bisect_leftmost`.

    Infinite sides are replaced by doubling steps away from a finite anchor
    until ``func(lo) < y`` (resp. ``func(hi) >= y``) or the step reaches 2**60.
    """
    y = np.asarray(y, dtype=float)
    shape = y.shape
    lo_fin, hi_fin = math.isfinite(interval.lo), math.isfinite(interval.hi)
    if lo_fin and hi_fin:
        return (np.full(shape, interval.lo), np.full(shape, interval.hi),
                np.full(shape, interval.lo_closed))

    if lo_fin:
        lo_anchor = hi_anchor = interval.lo
    elif hi_fin:
        lo_anchor = hi_anchor = interval.hi
    else:
        lo_anchor = hi_anchor = 0.0

    with np.errstate(all="ignore"):
        lo = np.full(shape, interval.lo) if lo_fin else np.full(shape, lo_anchor - 1.0)
        hi = np.full(shape, interval.hi) if hi_fin else np.full(shape, hi_anchor + 1.0)
        if not lo_fin:
            step = np.ones(shape)
            need = func(lo) >= y
            for _ in range(MAX_DOUBLINGS):
                if not need.any():
                    break
                step = np.where(need, 2.0 * step, step)
                lo = np.where(need, lo_anchor - step, lo)
                need = need & (func(lo) >= y)
        if not hi_fin:
            step = np.ones(shape)
            need = func(hi) < y
            for _ in range(MAX_DOUBLINGS):
                if not need.any():
                    break
                step = np.where(need, 2.0 * step, step)
                hi = np.where(need, hi_anchor + step, hi)
                need = need & (func(hi) < y)
    lo_closed = np.full(shape, interval.lo_closed if lo_fin else True)
    return lo, hi, lo_closed


@dataclass(frozen=True)
class GeneratorRange:
    """The range ``f(I) = <lo, hi>`` with attainment flags for each end."""

    lo: float
    hi: float
    lo_attained: bool
    hi_attained: bool

    def contains(self, y, tol: float = 0.0):
        """Vectorized membership with band ``tol * (1 + |y|)`` at attained finite ends."""
        y = np.asarray(y, dtype=float)
        band = tol * (1.0 + np.abs(y))
        ok = ~np.isnan(y)
        if math.isfinite(self.lo):
            ok &= (y >= self.lo - band) if self.lo_attained else (y > self.lo)
        if math.isfinite(self.hi):
            ok &= (y <= self.hi + band) if self.hi_attained else (y < self.hi)
        return bool(ok) if ok.ndim == 0 else ok

    def within(self, y, tol: float = 0.0):
        """Looser test against the closure, used to accept inversion targets."""
        y = np.asarray(y, dtype=float)
        band = tol * (1.0 + np.abs(y))
        ok = ~np.isnan(y)
        if math.isfinite(self.lo):
            ok &= y >= self.lo - band
        if math.isfinite(self.hi):
            ok &= y <= self.hi + band
        return ok


@dataclass(frozen=True)
class Generator:
    """A generating function ``t -> scale * base(t) + offset`` on ``domain``.

    Use the classmethod constructors (:meth:`power`, :meth:`logarithm`, ...)
    or :meth:`from_descriptor` rather than the raw constructor.
    """

    family: str
    domain: Interval
    params: tuple[tuple[str, float], ...] = ()
    table: tuple[tuple[float, float], ...] = ()
    scale: float = 1.0
    offset: float = 0.0
    _xs: np.ndarray = field(init=False, repr=False, compare=False)
    _ys: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown generator family {self.family!r}")
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "offset", float(self.offset))
        if not (math.isfinite(self.scale) and self.scale != 0.0):
            raise ValueError("scale must be finite and non-zero")
        if not math.isfinite(self.offset):
            raise ValueError("offset must be finite")
        p = dict(self.params)
        dom = self.domain
        if self.family == "affine":
            if p["a"] < 0:
                raise ValueError("affine generator needs a >= 0")
        elif self.family in ("power", "logarithm"):
            if dom.lo < 0 or (dom.lo == 0 and dom.lo_closed):
                raise ValueError(f"{self.family} generator needs a domain inside (0, inf), got {dom}")
        elif self.family == "exponential":
            if p["lam"] == 0:
                raise ValueError("exponential generator needs lam != 0")
        xs = ys = np.empty(0)
        if self.family == "monotone_table":
            pts = np.asarray(self.table, dtype=float)
            if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
                raise ValueError("monotone_table needs at least two [t, f(t)] pairs")
            xs, ys = pts[:, 0], pts[:, 1]
            if not np.all(np.isfinite(pts)):
                raise ValueError("monotone_table breakpoints must be finite")
            if np.any(np.diff(xs) <= 0):
                raise ValueError("monotone_table abscissae must be strictly increasing")
            if np.any(np.diff(ys) < 0):
                raise ValueError("monotone_table ordinates must be non-decreasing")
            if not dom.subinterval_of(Interval.closed(xs[0], xs[-1])):
                raise ValueError(f"domain {dom} is not covered by the table [{xs[0]}, {xs[-1]}]")
        object.__setattr__(self, "_xs", xs)
        object.__setattr__(self, "_ys", ys)
        self._check_monotone()

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls, domain: Interval) -> "Generator":
        return cls("identity", domain)

    @classmethod
    def affine(cls, a: float, b: float, domain: Interval) -> "Generator":
        if a == 1 and b == 0:
            return cls.identity(domain)
        return cls("affine", domain, (("a", float(a)), ("b", float(b))))

    @classmethod
    def power(cls, p: float, domain: Interval) -> "Generator":
        if p == 0:
            return cls.logarithm(domain)
        return cls("power", domain, (("p", float(p)),))

    @classmethod
    def logarithm(cls, domain: Interval) -> "Generator":
        return cls("logarithm", domain)

    @classmethod
    def exponential(cls, lam: float, domain: Interval) -> "Generator":
        return cls("exponential", domain, (("lam", float(lam)),))

    @classmethod
    def monotone_table(cls, points, domain: Interval | None = None) -> "Generator":
        pts = tuple((float(t), float(v)) for t, v in points)
        if domain is None:
            domain = Interval.closed(pts[0][0], pts[-1][0])
        return cls("monotone_table", domain, (), pts)

    @classmethod
    def from_descriptor(cls, desc: dict, domain: Interval) -> "Generator":
        """Build from a config descriptor such as ``{"family": "power", "p": 2.0}``.

        Optional ``scale`` and ``offset`` keys post-compose an affine map.
        """
        family = desc.get("family")
        if family == "identity":
            g = cls.identity(domain)
        elif family == "affine":
            g = cls.affine(float(desc["a"]), float(desc.get("b", 0.0)), domain)
        elif family == "power":
            g = cls.power(float(desc["p"]), domain)
        elif family == "logarithm":
            g = cls.logarithm(domain)
        elif family == "exponential":
            g = cls.exponential(float(desc.get("lam", desc.get("lambda"))), domain)
        elif family == "monotone_table":
            g = cls.monotone_table(desc["breakpoints"], domain)
        else:
            raise ValueError(f"unknown generator family {family!r}")
        scale = float(desc.get("scale", 1.0))
        offset = float(desc.get("offset", 0.0))
        if scale != 1.0 or offset != 0.0:
            g = replace(g, scale=scale, offset=offset)
        return g

    def descriptor(self) -> dict:
        desc: dict = {"family": self.family}
        desc.update(dict(self.params))
        if self.table:
            desc["breakpoints"] = [list(pt) for pt in self.table]
        if self.scale != 1.0:
            desc["scale"] = self.scale
        if self.offset != 0.0:
            desc["offset"] = self.offset
        return desc

    def label(self) -> str:
        inner = ",".join(f"{k}={v:g}" for k, v in self.params)
        if self.table:
            inner = f"{len(self.table)} pts"
        text = f"{self.family}({inner})" if inner else self.family
        if self.scale != 1.0:
            text = f"{self.scale:g}*{text}"
        if self.offset != 0.0:
            text = f"{text}{self.offset:+g}"
        return text

    # -- affine post-composition -------------------------------------------

    def shifted(self, d: float) -> "Generator":
        return replace(self, offset=self.offset + float(d))

    def scaled(self, c: float) -> "Generator":
        """``c * f``; the offset scales too."""
        return replace(self, scale=self.scale * c, offset=self.offset * c)

    def negated(self) -> "Generator":
        return self.scaled(-1.0)

    @property
    def increasing(self) -> bool:
        return self.scale > 0

    # -- evaluation ----------------------------------------------------------

    def _base(self, t: np.ndarray) -> np.ndarray:
        fam = self.family
        if fam == "identity":
            return t
        if fam == "affine":
            p = dict(self.params)
            return p["a"] * t + p["b"]
        if fam == "logarithm":
            return np.log(t)
        if fam == "power":
            p = dict(self.params)["p"]
            return t**p if p > 0 else -(t**p)
        if fam == "exponential":
            lam = dict(self.params)["lam"]
            return math.copysign(1.0, lam) * np.exp(lam * t)
        return np.interp(t, self._xs, self._ys)

    def _value(self, t) -> np.ndarray:
        """Evaluate without domain checks (callers guarantee membership)."""
        with np.errstate(all="ignore"):
            return self.scale * self._base(np.asarray(t, dtype=float)) + self.offset

    def eval(self, t, tol: float = DEFAULT_TOL):
        """Evaluate ``f(t)``; closed endpoints accept an overshoot of ``tol``."""
        t = np.asarray(t, dtype=float)
        inside = self.domain.contains(t, tol)
        if not np.all(inside):
            raise DomainError(f"{self.label()}: argument outside {self.domain}")
        out = self._value(self.domain.clip(t))
        return float(out) if out.ndim == 0 else out

    __call__ = eval

    # -- range and inversion -------------------------------------------------

    def _end_limit(self, side: str) -> float:
        end = self.domain.lo if side == "lo" else self.domain.hi
        if self.family == "affine" and dict(self.params)["a"] == 0:
            base = dict(self.params)["b"]
        else:
            with np.errstate(all="ignore"):
                base = float(self._base(np.asarray(end)))
        if math.isnan(base):
            raise ArithmeticError(f"{self.label()}: undefined limit at {end}")
        return self.scale * base + self.offset + 0.0

    def _flat_at(self, side: str) -> bool:
        if self.family == "affine" and dict(self.params)["a"] == 0:
            return True
        if self.family == "monotone_table":
            ys, xs = self._ys, self._xs
            if side == "lo":
                end = self.domain.lo
                j = np.searchsorted(xs, end, side="right")
                return j < len(xs) and ys[j] == ys[max(j - 1, 0)]
            end = self.domain.hi
            j = np.searchsorted(xs, end, side="left")
            return j > 0 and ys[j - 1] == ys[min(j, len(ys) - 1)]
        return False

    def range(self) -> GeneratorRange:
        """Infimum and supremum of ``f`` over the domain, with attainment."""
        dom = self.domain
        lo_val, hi_val = self._end_limit("lo"), self._end_limit("hi")
        lo_att = (math.isfinite(dom.lo) and dom.lo_closed) or self._flat_at("lo")
        hi_att = (math.isfinite(dom.hi) and dom.hi_closed) or self._flat_at("hi")
        if self.increasing:
            return GeneratorRange(lo_val, hi_val, lo_att, hi_att)
        return GeneratorRange(hi_val, lo_val, hi_att, lo_att)

    def generalized_inverse(self, y, tol: float = DEFAULT_TOL):
        """A preimage of ``y``; on plateaus, the leftmost one.

        Raises :class:`RangeError` when ``y`` is outside the range by more
        than ``tol * (1 + |y|)``.
        """
        y = np.asarray(y, dtype=float)
        rng = self.range()
        if not np.all(rng.within(y, tol)):
            raise RangeError(f"{self.label()}: value outside range [{rng.lo}, {rng.hi}]")
        y = np.clip(y, rng.lo, rng.hi)
        sign = 1.0 if self.increasing else -1.0

        def func(t):
            return sign * self._value(t)

        lo, hi, lo_closed = bracket(func, sign * y, self.domain)
        x = self.domain.clip(bisect_leftmost(func, sign * y, lo, hi, lo_closed))
        return float(x) if x.ndim == 0 else x

    def _check_monotone(self, count: int = 1000, slack: float = 1e-12) -> None:
        grid = self.domain.grid(count)
        vals = self._value(grid) * math.copysign(1.0, self.scale)
        finite = np.isfinite(vals)
        if not np.all(np.diff(vals[finite]) >= -slack):
            raise ValueError(f"{self.label()} is not monotone on {self.domain}")
