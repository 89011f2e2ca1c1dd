"""Command line interface: ``gqamean {eval,balance,solve,classify,verify}``.

CSV goes to ``--out`` (or the config's ``output``), else stdout; a short
human-readable summary goes to stderr.

Exit status: 0 balanced / verdicts agree / all checks pass, 1 violated or
a failed check, 2 classifier anomaly, 10 usage error, 11 config error,
12 domain or range error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import csvio
from .balance import BalanceReport, scan_balance, substituted_means
from .characterize import classify
from .config import ConfigError, ExperimentConfig, load
from .domain import DomainError, RangeError
from .inverse_system import solve_main
from .means import GQAMean
from .verify import results_csv, run_directory

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_ANOMALY = 2
EXIT_USAGE = 10
EXIT_CONFIG = 11
EXIT_DOMAIN = 12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_tuple(text: str, n: int | None = None) -> list[float]:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse tuple {text!r}; expected comma-separated numbers") from None
    if n is not None and len(values) != n:
        raise UsageError(f"tuple {text!r} has {len(values)} entries, expected {n}")
    return values


def eval_csv(cfg: ExperimentConfig, x) -> tuple[str, list]:
    m = cfg.build_mean()
    x = np.asarray(x, dtype=float)
    value = m(x)
    v = substituted_means(m, x)
    header = [*csvio.numbered("x", m.n), "M"]
    row = [*x, value]
    if isinstance(m, GQAMean):
        header += csvio.numbered("f", m.n)
        row += list(m.terms(x))
    header += csvio.numbered("v", m.n)
    row += list(v)
    return csvio.render(header, [row]), row


def run_balance(cfg: ExperimentConfig, seed: int | None = None) -> BalanceReport:
    return scan_balance(cfg.build_mean(), cfg.build_sigma(), cfg.build_sampler(seed), cfg.tol_zero)


def balance_csv(cfg: ExperimentConfig, seed: int | None = None) -> str:
    rep = run_balance(cfg, seed)
    return csvio.render(BalanceReport.csv_header(rep.n), [rep.csv_row()])


def solve_csv(cfg: ExperimentConfig, targets: list[list[float]]):
    m = cfg.build_mean()
    if not isinstance(m, GQAMean):
        raise ConfigError("solve needs a GQA mean (generators)")
    n = m.n
    header = [*csvio.numbered("c", n), *csvio.numbered("d", n), *csvio.numbered("alpha", n),
              "feasible", "failing", *csvio.numbered("x", n), "roundtrip_error"]
    rows, sols = [], []
    for c in targets:
        sol = solve_main(m, c)
        failing = " ".join(str(k) for k in sol.failing_indices())
        rows.append([*sol.target.c, *sol.target.d, *sol.alpha, bool(sol.feasible), failing,
                     *sol.x, float(sol.roundtrip_error)])
        sols.append(sol)
    return csvio.render(header, rows), sols


def classify_csv(cfg: ExperimentConfig, seed: int | None = None):
    m = cfg.build_mean()
    if not isinstance(m, GQAMean):
        raise ConfigError("classify needs a GQA mean (generators)")
    res = classify(m, cfg.build_sigma(), cfg.build_sampler(seed), cfg.tol_shift, cfg.tol_zero)
    header = ["mean", *csvio.numbered("D", m.n), "max_deviation", "balance_max_residual",
              "shift_verdict", "balance_verdict", "agree"]
    row = [res.label, *res.shift.D, res.shift.max_deviation, res.balance.max_abs_residual,
           res.verdict, res.balance.verdict, res.agree]
    return csvio.render(header, [row]), res


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gqamean", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, seed=True):
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--out", help="write CSV here instead of stdout")
        if seed:
            p.add_argument("--seed", type=int, help="override the sampler seed")

    p = sub.add_parser("eval", help="evaluate M(x), f_k(x_k) and v_k(x)")
    common(p, seed=False)
    p.add_argument("--x", required=True, help="comma-separated point, e.g. 0,1")

    p = sub.add_parser("balance", help="scan the balance residual")
    common(p)

    p = sub.add_parser("solve", help="solve v_k(x) = c_k in closed form")
    common(p, seed=False)
    p.add_argument("--c", required=True, action="append", help="comma-separated targets (repeatable)")

    p = sub.add_parser("classify", help="shift-constant verdict checked against a balance scan")
    common(p)

    p = sub.add_parser("verify", help="run a directory of acceptance checks")
    p.add_argument("config_dir", help="directory of *.json checks")
    p.add_argument("--out", help="write CSV here instead of stdout")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except UsageError as exc:
        _note(f"gqamean: error: {exc}")
        return EXIT_USAGE
    except ConfigError as exc:
        _note(f"gqamean: config error: {exc}")
        return EXIT_CONFIG
    except (DomainError, RangeError) as exc:
        _note(f"gqamean: {exc}")
        return EXIT_DOMAIN


def _dispatch(args) -> int:
    if args.command == "verify":
        results = run_directory(args.config_dir)
        for r in results:
            _note(r.line())
        _emit(results_csv(results), args.out)
        return EXIT_OK if all(r.passed for r in results) else EXIT_VIOLATED

    cfg = load(args.config)
    out = args.out or cfg.output

    if args.command == "eval":
        text, row = eval_csv(cfg, parse_tuple(args.x, cfg.n))
        _note(f"M(x) = {row[cfg.n]:.17g}")
        _emit(text, out)
        return EXIT_OK

    if args.command == "balance":
        rep = run_balance(cfg, args.seed)
        _note(f"{rep.verdict}: max |residual| = {rep.max_abs_residual:.3e} over "
              f"{rep.samples_evaluated} samples, witness {rep.argmax_point}")
        _emit(csvio.render(BalanceReport.csv_header(rep.n), [rep.csv_row()]), out)
        return EXIT_OK if rep.balanced else EXIT_VIOLATED

    if args.command == "solve":
        targets = [parse_tuple(c, cfg.n) for c in args.c]
        text, sols = solve_csv(cfg, targets)
        for sol in sols:
            state = "feasible" if sol.feasible else f"infeasible at k = {sol.failing_indices()}"
            _note(f"c = {sol.target.c.tolist()}: {state}")
        _emit(text, out)
        return EXIT_OK

    if args.command == "classify":
        text, res = classify_csv(cfg, args.seed)
        _note(f"{res.verdict} / {res.balance.verdict}: "
              f"{'agree' if res.agree else 'ANOMALY: verdicts disagree'}")
        _emit(text, out)
        return EXIT_OK if res.agree else EXIT_ANOMALY

    raise UsageError(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
