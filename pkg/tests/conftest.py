import sys
from pathlib import Path

import pytest

from gqamean import GQAMean, Generator, Interval

sys.path.insert(0, str(Path(__file__).parent))

ROOT = Path(__file__).resolve().parents[1]
ACCEPTANCE_DIR = ROOT / "configs" / "acceptance"

ACCEPTANCE_LINES: list[str] = []

UNIT = Interval.closed(0.0, 1.0)
ONE_TWO = Interval.closed(1.0, 2.0)

PLATEAU = [(1, 1), (1.4, 1.5), (1.6, 1.5), (2, 2)]
TABLE = [(0, 0), (0.5, 1), (1, 1.5), (2, 4)]


def shift_tuples():
    """Six tuples of the form f_k = phi + D_k."""
    I, Z = ONE_TWO, Interval.closed(0.0, 2.0)
    ln = Generator.logarithm(I)
    ex = Generator.exponential(1.0, I)
    rec = Generator.power(-1.0, I)
    tab = Generator.monotone_table(TABLE, Z)
    return [
        GQAMean([ln, ln.shifted(1), ln.shifted(-2)]),
        GQAMean([Generator.power(2, I)] * 2),
        GQAMean([Generator.identity(UNIT), Generator.identity(UNIT).shifted(3)]),
        GQAMean([ex, ex.shifted(-1), ex.shifted(0.5)]),
        GQAMean([rec, rec.shifted(1), rec.shifted(2), rec.shifted(-3)]),
        GQAMean([tab, tab.shifted(2)]),
    ]


def non_shift_tuples():
    """Tuples whose generators do not differ by constants."""
    I = ONE_TWO
    idf, ln = Generator.identity(I), Generator.logarithm(I)
    return [
        GQAMean([idf, Generator.power(3, I)]),
        GQAMean([ln, idf]),
        GQAMean([Generator.power(0.5, I), Generator.exponential(1.0, I)]),
        GQAMean([ln, ln.scaled(2)]),
        GQAMean([idf, ln, Generator.power(2, I)]),
        GQAMean([idf, idf, Generator.power(3, I)]),
        GQAMean([idf, Generator.monotone_table(PLATEAU, I)]),
    ]


@pytest.fixture
def id_cube():
    return GQAMean([Generator.identity(ONE_TWO), Generator.power(3, ONE_TWO)])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
