"""Config-driven acceptance battery.

Each ``*.json`` file in a battery directory holds one check::

    {"criterion": "forward_theorem", "title": "...", ...parameters}

and yields one :class:`CheckResult`. Means inside a check are written like
experiment configs (``interval`` plus ``generators`` or ``mean``).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import csvio
from .balance import Sampler, balance_residual, f_space_residual, scan_balance
from .characterize import (
    QUASI_ARITHMETIC,
    classify,
    necessary_condition_residual,
)
from .config import ConfigError, from_dict
from .domain import Interval, Permutation, permutation_from_spec
from .generators import Generator
from .inverse_system import (
    alpha_bounds,
    offdiag_inverse,
    offdiag_matrix,
    reduce_targets,
    solve_main,
    solvable_neighborhood,
)
from .means import CoordinateMean, GQAMean, Mean, MinMaxMean, is_symmetric, quasi_arithmetic


@dataclass(frozen=True)
class CheckResult:
    criterion: str
    title: str
    passed: bool
    measured: float
    threshold: float
    detail: str = ""

    HEADER = ("criterion", "title", "passed", "measured", "threshold", "detail")

    def row(self) -> list:
        return [self.criterion, self.title, self.passed, self.measured, self.threshold, self.detail]

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.criterion}: {self.title} "
                f"(measured {self.measured:.3e}, threshold {self.threshold:.3e}) {self.detail}").rstrip()


def build_mean(entry: dict, source: str) -> Mean:
    data = dict(entry)
    if "sampler" not in data:
        try:
            box = list(Interval.from_dict(data["interval"]).finite_box())
        except (KeyError, TypeError, ValueError):
            box = None  # from_dict reports the interval problem
        data["sampler"] = {"mode": "grid"} if box is None else {"mode": "grid", "box": box}
    return from_dict(data, source).build_mean()


def _sigmas(spec, n: int, seed: int) -> list[Permutation]:
    if spec == "all":
        return [Permutation(p) for p in itertools.permutations(range(1, n + 1))]
    out = []
    for s in spec:
        if s == "random":
            out.append(Permutation.random(n, np.random.default_rng(seed + n)))
        else:
            out.append(permutation_from_spec(s, n))
    return out


def _random_sampler(params: dict) -> Sampler:
    box = params.get("box")
    return Sampler("random", count=int(params.get("samples", 10_000)),
                   seed=int(params.get("seed", 0)), box=None if box is None else tuple(box))


def check_forward_theorem(p: dict, src: str) -> CheckResult:
    interval = Interval.from_dict(p["interval"])
    sampler = _random_sampler(p)
    tol = float(p.get("tol", 1e-9))
    worst, where = 0.0, ""
    for desc in p["generators"]:
        gen = Generator.from_descriptor(desc, interval)
        for n in p.get("ns", [2, 3, 4]):
            m = quasi_arithmetic(gen, n)
            for sigma in _sigmas(p.get("sigmas", ["identity", "reversal", "random"]), n,
                                 int(p.get("permutation_seed", 0))):
                rep = scan_balance(m, sigma, sampler, tol)
                if rep.max_abs_residual >= worst:
                    worst, where = rep.max_abs_residual, f"{gen.label()} n={n} sigma=({sigma.label()})"
    return CheckResult(p["criterion"], p.get("title", ""), worst <= tol, worst, tol, f"worst at {where}")


def check_converse(p: dict, src: str) -> CheckResult:
    sampler = _random_sampler(p)
    threshold = float(p.get("threshold", 1e-6))
    tol_zero = float(p.get("tol_zero", 1e-9))
    weakest, where, ok = np.inf, "", True
    for i, entry in enumerate(p["means"]):
        m = build_mean(entry, f"{src}: means[{i}]")
        for sigma in _sigmas(p.get("sigmas", "all"), m.n, int(p.get("permutation_seed", 0))):
            rep = scan_balance(m, sigma, sampler, tol_zero)
            ok &= (not rep.balanced) and rep.max_abs_residual > threshold
            if rep.max_abs_residual < weakest:
                weakest, where = rep.max_abs_residual, f"{m.label()} sigma=({sigma.label()})"
    return CheckResult(p["criterion"], p.get("title", ""), bool(ok), float(weakest), threshold,
                       f"weakest at {where}")


def check_minmax_remark(p: dict, src: str) -> CheckResult:
    interval = Interval.from_dict(p["interval"])
    sampler = Sampler("grid", per_axis=int(p.get("per_axis", 50)))
    sigma = Permutation.reversal(2)
    tol_zero = float(p.get("tol_zero", 1e-9))
    balanced = []
    witness = None
    for i in range(11):
        t = i / 10
        rep = scan_balance(MinMaxMean(t, interval), sigma, sampler, tol_zero)
        if rep.balanced:
            balanced.append(t)
        if abs(t - float(p.get("witness_t", 0.3))) < 1e-12:
            witness = rep.max_abs_residual
    expected = [float(v) for v in p.get("expected_balanced", [0.0, 0.5, 1.0])]
    floor = float(p.get("witness_min", 0.084))
    slack = float(p.get("rounding_slack", 1e-12))
    ok = balanced == expected and witness is not None and witness >= floor - slack
    return CheckResult(p["criterion"], p.get("title", ""), ok, float(witness), floor,
                       "balanced t = " + " ".join(f"{t:g}" for t in balanced))


def check_coordinate_remark(p: dict, src: str) -> CheckResult:
    interval = Interval.from_dict(p["interval"])
    sampler = _random_sampler(p)
    tol = float(p.get("tol", 1e-12))
    worst, symmetric = 0.0, False
    pts = sampler.points(interval, 2)
    for index in (1, 2):
        m = CoordinateMean(index, interval)
        for sigma in (Permutation.identity(2), Permutation.reversal(2)):
            worst = max(worst, scan_balance(m, sigma, sampler, tol).max_abs_residual)
        symmetric |= is_symmetric(m, pts[:100])
    return CheckResult(p["criterion"], p.get("title", ""), worst <= tol and not symmetric, worst, tol,
                       f"symmetric={'true' if symmetric else 'false'}")


def _draw_in(interval: Interval, count: int, n: int, rng) -> np.ndarray:
    return interval.clip(rng.uniform(interval.lo, interval.hi, size=(count, n)))


def generic_alpha(m: GQAMean, c) -> np.ndarray:
    """Solve ``A y = d - z`` by dense LU elimination."""
    rt = reduce_targets(m, c)
    rhs = rt.d - rt.g_at_mean
    return np.linalg.solve(offdiag_matrix(m.n), rhs.T).T


def check_solver(p: dict, src: str) -> CheckResult:
    tol_inv = float(p.get("tol_inverse", 1e-14))
    tol_rt = float(p.get("tol_roundtrip", 1e-8))
    tol_alpha = float(p.get("tol_alpha", 1e-11))
    inv_err = max(float(np.max(np.abs(offdiag_inverse(n) - np.linalg.inv(offdiag_matrix(n)))))
                  for n in range(2, 9))
    draws = int(p.get("draws", 1000))
    rng = np.random.default_rng(int(p.get("seed", 0)))
    rt_err = alpha_err = 0.0
    all_feasible = True
    for i, entry in enumerate(p["means"]):
        m = build_mean(entry, f"{src}: means[{i}]")
        U = solvable_neighborhood(m, float(entry["p"]), tuple(entry["bracket"]))
        c = _draw_in(U, draws, m.n, rng)
        sol = solve_main(m, c)
        all_feasible &= bool(sol.feasible.all())
        rt_err = max(rt_err, float(np.nanmax(sol.roundtrip_error)))
        alpha_err = max(alpha_err, float(np.max(np.abs(sol.alpha - generic_alpha(m, c)))))
    ok = inv_err <= tol_inv and all_feasible and rt_err <= tol_rt and alpha_err <= tol_alpha
    return CheckResult(p["criterion"], p.get("title", ""), ok, rt_err, tol_rt,
                       f"inverse_err={inv_err:.3e} alpha_err={alpha_err:.3e} "
                       f"all_feasible={'true' if all_feasible else 'false'}")


def check_sandwich(p: dict, src: str) -> CheckResult:
    slack = float(p.get("slack", 1e-10))
    draws = int(p.get("draws", 1000))
    rng = np.random.default_rng(int(p.get("seed", 0)))
    worst = -np.inf
    for i, entry in enumerate(p["means"]):
        m = build_mean(entry, f"{src}: means[{i}]")
        box = entry.get("box", [m.domain.lo, m.domain.hi])
        c = m.domain.clip(rng.uniform(box[0], box[1], size=(draws, m.n)))
        sol = solve_main(m, c)
        lower, upper = alpha_bounds(m, c)
        worst = max(worst, float(np.max(lower - sol.alpha)), float(np.max(sol.alpha - upper)))
    return CheckResult(p["criterion"], p.get("title", ""), worst <= slack, worst, slack,
                       "max bound violation (negative = strict)")


def lipschitz_bound(m: GQAMean, a: float, b: float, grid: int = 4096) -> float:
    t = np.linspace(a, b, grid)
    F = m._F(t)
    return float(np.max(np.diff(F) / np.diff(t)))


def vanishing_mismatches(m: GQAMean, sigma: Permutation, pts: np.ndarray, tol_zero: float,
                         lipschitz: float) -> int:
    """Points where exactly one of the two residuals counts as zero, or the signs differ."""
    rho = np.asarray(balance_residual(m, sigma, pts))
    fres = np.asarray(f_space_residual(m, sigma, pts))
    zero_rho = np.abs(rho) <= tol_zero
    zero_f = np.abs(fres) <= m.n * lipschitz * tol_zero
    sign_clash = ~zero_rho & ~zero_f & (np.sign(rho) != np.sign(fres))
    return int(np.count_nonzero(zero_rho != zero_f) + np.count_nonzero(sign_clash))


def check_identities(p: dict, src: str) -> CheckResult:
    tol = float(p.get("tol", 1e-10))
    tol_zero = float(p.get("tol_zero", 1e-9))
    samples = int(p.get("samples", 1000))
    rng = np.random.default_rng(int(p.get("seed", 0)))
    sampler = _random_sampler({"samples": p.get("scan_samples", 10_000), "seed": p.get("seed", 0)})
    g_err = inv_err = 0.0
    mismatches = 0
    for i, entry in enumerate(p["means"]):
        m = build_mean(entry, f"{src}: means[{i}]")
        a, b = m.domain.lo, m.domain.hi
        t = rng.uniform(a, b, samples)
        u = rng.uniform(m.F_eval(a), m.F_eval(b), samples)
        g_err = max(g_err, float(np.max(np.abs(m.g(u).sum(axis=-1) - u))))
        inv_err = max(inv_err, float(np.max(np.abs(m.F_inverse(m.F_eval(t)) - t))))
        L = lipschitz_bound(m, a, b)
        pts = sampler.points(m.domain, m.n)
        for sigma in (Permutation.identity(m.n), Permutation.reversal(m.n)):
            mismatches += vanishing_mismatches(m, sigma, pts, tol_zero, L)
    worst = max(g_err, inv_err)
    return CheckResult(p["criterion"], p.get("title", ""), worst <= tol and mismatches == 0, worst, tol,
                       f"g_sum_err={g_err:.3e} inverse_err={inv_err:.3e} vanishing_mismatches={mismatches}")


def check_necessary_condition(p: dict, src: str) -> CheckResult:
    tol = float(p.get("tol", 1e-9))
    sampler = _random_sampler(p)
    worst = 0.0
    for i, entry in enumerate(p["shift_means"]):
        m = build_mean(entry, f"{src}: shift_means[{i}]")
        pts = sampler.points(m.domain, m.n)
        for sigma in (Permutation.identity(m.n), Permutation.reversal(m.n)):
            worst = max(worst, float(np.max(np.abs(necessary_condition_residual(m, sigma, pts)))))
    w = p["witness"]
    wm = build_mean(w["mean"], f"{src}: witness.mean")
    wval = abs(necessary_condition_residual(wm, permutation_from_spec(w.get("sigma", "identity"), wm.n),
                                            w["x"]))
    floor = float(w.get("min", 1e-4))
    return CheckResult(p["criterion"], p.get("title", ""), worst <= tol and wval > floor, worst, tol,
                       f"witness |residual|={wval:.6e} > {floor:g}")


def check_classifier_agreement(p: dict, src: str) -> CheckResult:
    anomalies = 0
    count = 0
    counts = {QUASI_ARITHMETIC: 0, "not_quasi_arithmetic": 0}
    for i, entry in enumerate(p["means"]):
        data = dict(entry)
        data.setdefault("sampler", p.get("sampler"))
        cfg = from_dict(data, f"{src}: means[{i}]")
        m = cfg.build_mean()
        res = classify(m, cfg.build_sigma(), cfg.build_sampler(), cfg.tol_shift, cfg.tol_zero)
        anomalies += res.anomaly
        counts[res.verdict] += 1
        count += 1
    return CheckResult(p["criterion"], p.get("title", ""), anomalies == 0 and count >= 12, float(anomalies),
                       0.0, f"means={count} qa={counts[QUASI_ARITHMETIC]} "
                            f"non_qa={counts['not_quasi_arithmetic']}")


def check_reproducibility(p: dict, src: str) -> CheckResult:
    from .cli import balance_csv

    cfg = from_dict(p["config"], f"{src}: config")
    first = balance_csv(cfg)
    second = balance_csv(from_dict(json.loads(json.dumps(p["config"])), f"{src}: config"))
    same = first == second
    return CheckResult(p["criterion"], p.get("title", ""), same, 0.0 if same else 1.0, 0.0,
                       f"bytes={len(first)}")


CHECKS: dict[str, Callable[[dict, str], CheckResult]] = {
    "forward_theorem": check_forward_theorem,
    "converse": check_converse,
    "minmax_remark": check_minmax_remark,
    "coordinate_remark": check_coordinate_remark,
    "solver": check_solver,
    "sandwich": check_sandwich,
    "identities": check_identities,
    "necessary_condition": check_necessary_condition,
    "classifier_agreement": check_classifier_agreement,
    "reproducibility": check_reproducibility,
}


def run_file(path: Path) -> CheckResult:
    try:
        params = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    kind = params.get("criterion")
    if kind not in CHECKS:
        raise ConfigError(f"{path}: criterion: unknown check {kind!r}")
    try:
        return CHECKS[kind](params, str(path))
    except KeyError as exc:
        raise ConfigError(f"{path}: missing field {exc}") from None


def run_directory(config_dir) -> list[CheckResult]:
    config_dir = Path(config_dir)
    if not config_dir.is_dir():
        raise ConfigError(f"{config_dir}: not a directory")
    files = sorted(config_dir.glob("*.json"))
    if not files:
        raise ConfigError(f"{config_dir}: no *.json configs found")
    return [run_file(f) for f in files]


def results_csv(results: list[CheckResult]) -> str:
    return csvio.render(CheckResult.HEADER, [r.row() for r in results])
