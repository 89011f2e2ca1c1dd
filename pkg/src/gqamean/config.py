"""Experiment configuration: JSON documents describing a mean and a scan.

Example::

    {
      "interval": {"lo": 1, "hi": 2},
      "generators": [{"family": "identity"}, {"family": "power", "p": 3}],
      "sigma": "reversal",
      "sampler": {"mode": "random", "count": 10000, "seed": 7},
      "tolerances": {"zero": 1e-9}
    }

``mean`` selects a non-GQA mean instead: ``{"kind": "minmax", "t": 0.3}``
or ``{"kind": "coordinate", "index": 1}``. Endpoints accept ``"inf"`` and
``"-inf"``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .balance import DEFAULT_TOL_ZERO, Sampler
from .characterize import DEFAULT_TOL_SHIFT
from .domain import Interval, Permutation, permutation_from_spec
from .generators import DEFAULT_TOL, Generator
from .means import CoordinateMean, GQAMean, Mean, MinMaxMean


class ConfigError(ValueError):
    """Malformed configuration; the message names the offending field."""


@dataclass
class ExperimentConfig:
    interval: Interval
    n: int
    mean_kind: str = "gqa"
    generators: list[dict] = field(default_factory=list)
    mean_params: dict = field(default_factory=dict)
    sigma: Any = "identity"
    sampler: dict = field(default_factory=dict)
    tol_eval: float = DEFAULT_TOL
    tol_zero: float = DEFAULT_TOL_ZERO
    tol_shift: float = DEFAULT_TOL_SHIFT
    output: str | None = None
    extra: dict = field(default_factory=dict)

    def build_mean(self) -> Mean:
        if self.mean_kind == "minmax":
            return MinMaxMean(float(self.mean_params["t"]), self.interval)
        if self.mean_kind == "coordinate":
            return CoordinateMean(int(self.mean_params["index"]), self.interval)
        gens = [Generator.from_descriptor(d, self.interval) for d in self.generators]
        return GQAMean(gens, tol=self.tol_eval)

    def build_sigma(self) -> Permutation:
        return permutation_from_spec(self.sigma, self.n)

    def build_sampler(self, seed: int | None = None) -> Sampler:
        s = dict(self.sampler)
        if seed is not None:
            s["seed"] = seed
        box = s.get("box")
        return Sampler(
            mode=s.get("mode", "random"),
            count=int(s.get("count", 10_000)),
            per_axis=int(s.get("per_axis", 50)),
            seed=None if s.get("seed") is None else int(s["seed"]),
            box=None if box is None else (float(box[0]), float(box[1])),
        )


def _num(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    try:
        out = float(value)
    except ValueError:
        raise ConfigError(f"{where}: expected a number, got {value!r}") from None
    if math.isnan(out):
        raise ConfigError(f"{where}: NaN is not allowed")
    return out


def _check_generator(desc, where: str, interval: Interval) -> dict:
    if not isinstance(desc, dict):
        raise ConfigError(f"{where}: generator descriptor must be an object")
    family = desc.get("family")
    required = {
        "identity": [], "logarithm": [], "affine": ["a"], "power": ["p"],
        "exponential": ["lam"], "monotone_table": ["breakpoints"],
    }
    if family not in required:
        raise ConfigError(f"{where}.family: unknown family {family!r}")
    if family == "exponential" and "lam" not in desc and "lambda" in desc:
        desc = {**desc, "lam": desc["lambda"]}
    for key in required[family]:
        if key not in desc:
            raise ConfigError(f"{where}.{key}: missing for family {family!r}")
    for key in ("a", "b", "p", "lam", "scale", "offset"):
        if key in desc:
            _num(desc[key], f"{where}.{key}")
    if family == "monotone_table":
        pts = desc["breakpoints"]
        if not isinstance(pts, list) or not all(isinstance(p, list) and len(p) == 2 for p in pts):
            raise ConfigError(f"{where}.breakpoints: expected a list of [t, f(t)] pairs")
        for i, (t, v) in enumerate(pts):
            _num(t, f"{where}.breakpoints[{i}][0]")
            _num(v, f"{where}.breakpoints[{i}][1]")
    try:
        Generator.from_descriptor(desc, interval)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"{where}: {exc}") from None
    return desc


def from_dict(data: dict, source: str = "<config>") -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be an object")
    if "interval" not in data:
        raise ConfigError(f"{source}: interval: missing")
    iv = data["interval"]
    if not isinstance(iv, dict) or "lo" not in iv or "hi" not in iv:
        raise ConfigError(f"{source}: interval: expected an object with lo and hi")
    try:
        interval = Interval.from_dict(iv)
    except ValueError as exc:
        raise ConfigError(f"{source}: interval: {exc}") from None

    mean = data.get("mean", {"kind": "gqa"})
    kind = mean.get("kind", "gqa") if isinstance(mean, dict) else None
    if kind not in ("gqa", "minmax", "coordinate"):
        raise ConfigError(f"{source}: mean.kind: expected gqa, minmax or coordinate, got {kind!r}")
    gens: list[dict] = []
    params: dict = {}
    if kind == "gqa":
        raw = data.get("generators")
        if not isinstance(raw, list) or len(raw) < 2:
            raise ConfigError(f"{source}: generators: expected a list of at least two descriptors")
        gens = [_check_generator(d, f"{source}: generators[{i}]", interval) for i, d in enumerate(raw)]
        n = len(gens)
        if "n" in data and int(data["n"]) != n:
            raise ConfigError(f"{source}: n: {data['n']} does not match {n} generators")
    else:
        n = 2
        if "n" in data and int(data["n"]) != 2:
            raise ConfigError(f"{source}: n: {kind} means have two variables")
        key = "t" if kind == "minmax" else "index"
        if key not in mean:
            raise ConfigError(f"{source}: mean.{key}: missing")
        params = {key: _num(mean[key], f"{source}: mean.{key}")}

    sigma = data.get("sigma", "identity")
    try:
        permutation_from_spec(sigma, n)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{source}: sigma: {exc}") from None

    sampler = data.get("sampler", {})
    if not isinstance(sampler, dict):
        raise ConfigError(f"{source}: sampler: expected an object")
    mode = sampler.get("mode", "random")
    if mode not in ("random", "grid"):
        raise ConfigError(f"{source}: sampler.mode: expected random or grid, got {mode!r}")
    if mode == "random" and "seed" not in sampler:
        raise ConfigError(f"{source}: sampler.seed: required when mode is random")
    if "box" in sampler:
        box = sampler["box"]
        if not (isinstance(box, list) and len(box) == 2):
            raise ConfigError(f"{source}: sampler.box: expected [lo, hi]")
        _num(box[0], f"{source}: sampler.box[0]")
        _num(box[1], f"{source}: sampler.box[1]")
    elif not interval.is_bounded:
        raise ConfigError(f"{source}: sampler.box: required for the unbounded interval {interval}")

    tols = data.get("tolerances", {})
    cfg = ExperimentConfig(
        interval=interval,
        n=n,
        mean_kind=kind,
        generators=gens,
        mean_params=params,
        sigma=sigma,
        sampler=sampler,
        tol_eval=_num(tols.get("eval", DEFAULT_TOL), f"{source}: tolerances.eval"),
        tol_zero=_num(tols.get("zero", DEFAULT_TOL_ZERO), f"{source}: tolerances.zero"),
        tol_shift=_num(tols.get("shift", DEFAULT_TOL_SHIFT), f"{source}: tolerances.shift"),
        output=data.get("output"),
        extra={k: v for k, v in data.items() if k not in {
            "interval", "n", "mean", "generators", "sigma", "sampler", "tolerances", "output"}},
    )
    try:
        cfg.build_mean()
        cfg.build_sampler()
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    return cfg


def loads(text: str, source: str = "<config>") -> ExperimentConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return from_dict(data, source)


def load(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    return loads(text, str(path))
