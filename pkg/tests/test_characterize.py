import numpy as np
import pytest

from gqamean import (
    Generator,
    GQAMean,
    Interval,
    Sampler,
    classify,
    estimate_shift_profile,
    geometric,
    identity_permutation,
    necessary_condition_residual,
    reversal_permutation,
)
from gqamean.characterize import NOT_QUASI_ARITHMETIC, QUASI_ARITHMETIC

from conftest import ONE_TWO, non_shift_tuples, shift_tuples

# 40-digit reference values for f = (id, x^3) at x = (1, 2)
NC_ID = -1.534515263858059444037049
NC_REV = 1.534515263858059444037049

ID2, REV2 = identity_permutation(2), reversal_permutation(2)


class TestNecessaryCondition:
    def test_quasi_arithmetic_zero(self):
        m = geometric(3, ONE_TWO)
        x = np.random.default_rng(0).uniform(1, 2, (500, 3))
        assert np.max(np.abs(necessary_condition_residual(m, reversal_permutation(3), x))) <= 1e-13

    def test_diagonal(self, id_cube):
        assert necessary_condition_residual(id_cube, ID2, [1.6, 1.6]) == pytest.approx(0.0, abs=1e-14)

    def test_witness(self, id_cube):
        assert necessary_condition_residual(id_cube, ID2, [1, 2]) == pytest.approx(NC_ID, rel=1e-12)
        assert necessary_condition_residual(id_cube, REV2, [1, 2]) == pytest.approx(NC_REV, rel=1e-12)

    @pytest.mark.parametrize("m", shift_tuples(), ids=lambda m: m.label())
    def test_shift_tuples_vanish(self, m):
        x = np.random.default_rng(1).uniform(m.domain.lo, m.domain.hi, (1000, m.n))
        for sigma in (identity_permutation(m.n), reversal_permutation(m.n)):
            assert np.max(np.abs(necessary_condition_residual(m, sigma, x))) <= 1e-9


class TestShiftProfile:
    def test_log_shift(self):
        ln = Generator.logarithm(ONE_TWO)
        p = estimate_shift_profile(GQAMean([ln, ln.shifted(5)]), np.linspace(1, 2, 100))
        assert p.D == pytest.approx((0.0, 5.0), abs=1e-14) and p.max_deviation <= 1e-14

    def test_identical(self):
        idf = Generator.identity(ONE_TWO)
        p = estimate_shift_profile(GQAMean([idf, idf]), np.linspace(1, 2, 100))
        assert p.D == (0.0, 0.0) and p.max_deviation == 0.0

    def test_id_cube(self, id_cube):
        p = estimate_shift_profile(id_cube, np.linspace(1, 2, 100))
        assert p.max_deviation > 0.5
        assert p.argmax in (1.0, 2.0)

    def test_normalized_scale_free(self):
        ln = Generator.logarithm(ONE_TWO)
        grid = np.linspace(1, 2, 200)
        base = estimate_shift_profile(GQAMean([ln, Generator.identity(ONE_TWO)]), grid, normalize=True)
        big = estimate_shift_profile(GQAMean([ln.scaled(1e6), Generator.identity(ONE_TWO).scaled(1e6)]),
                                     grid, normalize=True)
        assert big.max_deviation == pytest.approx(base.max_deviation, rel=1e-9)

    def test_rescaled_copy_is_not_a_shift(self):
        # (ln, 2 ln) must stay non-quasi-arithmetic after normalization
        ln = Generator.logarithm(ONE_TWO)
        p = estimate_shift_profile(GQAMean([ln, ln.scaled(2)]), np.linspace(1, 2, 512), normalize=True)
        assert p.max_deviation > 0.1

    def test_normalized_keeps_units(self):
        ln = Generator.logarithm(ONE_TWO)
        p = estimate_shift_profile(GQAMean([ln, ln.shifted(5)]), np.linspace(1, 2, 100), normalize=True)
        assert p.D == pytest.approx((0.0, 5.0), rel=1e-14)

    def test_grid_too_small(self, id_cube):
        with pytest.raises(ValueError):
            estimate_shift_profile(id_cube, [1.5])


class TestClassify:
    SAMPLER = Sampler(count=5000, seed=9)

    def test_log_shift_triple(self):
        ln = Generator.logarithm(ONE_TWO)
        c = classify(GQAMean([ln, ln.shifted(1), ln.shifted(-2)]), reversal_permutation(3), self.SAMPLER)
        assert c.verdict == QUASI_ARITHMETIC and c.balance.balanced and c.agree

    def test_id_cube(self, id_cube):
        c = classify(id_cube, REV2, self.SAMPLER)
        assert c.verdict == NOT_QUASI_ARITHMETIC and not c.balance.balanced and not c.anomaly

    def test_squares(self):
        sq = Generator.power(2, ONE_TWO)
        c = classify(GQAMean([sq, sq]), ID2, self.SAMPLER)
        assert c.verdict == QUASI_ARITHMETIC and c.balance.balanced

    def test_unbounded_domain_uses_box(self):
        ex = Generator.exponential(1.0, Interval.real_line())
        c = classify(GQAMean([ex, ex.shifted(2)]), ID2, Sampler(count=2000, seed=1, box=(-2, 2)))
        assert c.verdict == QUASI_ARITHMETIC and c.agree


BATTERY = [(m, QUASI_ARITHMETIC) for m in shift_tuples()] + [
    (m, NOT_QUASI_ARITHMETIC) for m in non_shift_tuples()
]


@pytest.mark.parametrize("m,expected", BATTERY, ids=[m.label() for m, _ in BATTERY])
def test_battery_agreement(m, expected):
    for sigma in (identity_permutation(m.n), reversal_permutation(m.n)):
        c = classify(m, sigma, Sampler(count=4000, seed=3))
        assert c.agree and c.verdict == expected
