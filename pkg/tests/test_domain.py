import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gqamean import (
    DomainError,
    Interval,
    Permutation,
    identity_permutation,
    reversal_permutation,
    substitute,
)
from gqamean.domain import permutation_from_spec


class TestInterval:
    def test_interior_point(self):
        assert Interval.closed(0, 1).contains(0.5, 0.0)

    def test_open_endpoint_excluded(self):
        assert not Interval.open(0, 1).contains(0.0, 0.0)

    def test_closed_endpoint_tolerance(self):
        iv = Interval.closed(1, 2)
        assert iv.contains(2 + 1e-15, 1e-12)
        assert not iv.contains(2 + 1e-15, 0.0)

    def test_infinite_endpoints_pass(self):
        iv = Interval.real_line()
        assert iv.contains(-1e300) and iv.contains(1e300)

    def test_vectorized(self):
        out = Interval(0, 1, False, True).contains(np.array([0.0, 0.5, 1.0, 1.5]))
        assert out.tolist() == [False, True, True, False]

    @pytest.mark.parametrize("lo,hi", [(1, 1), (2, 1)])
    def test_trivial_interval_rejected(self, lo, hi):
        with pytest.raises(ValueError):
            Interval.closed(lo, hi)

    def test_infinite_endpoint_cannot_be_closed(self):
        with pytest.raises(ValueError):
            Interval(0, math.inf, True, True)

    def test_from_dict_strings(self):
        iv = Interval.from_dict({"lo": "-inf", "hi": 3})
        assert iv.lo == -math.inf and not iv.lo_closed and iv.hi_closed

    def test_interior(self):
        iv = Interval.closed(0, 1).interior()
        assert not iv.contains(0.0) and not iv.contains(1.0)

    def test_grid_skips_open_ends(self):
        g = Interval(0, 1, False, True).grid(5)
        assert len(g) == 5 and g[0] > 0 and g[-1] == 1.0

    @given(st.floats(-10, 10), st.floats(0, 1), st.floats(0, 1))
    def test_contains_monotone_in_tol(self, t, t1, extra):
        iv = Interval.closed(-1, 1)
        if iv.contains(t, t1):
            assert iv.contains(t, t1 + extra)


class TestSubstitute:
    def test_middle(self):
        assert substitute([1, 2, 3], 2, 9).tolist() == [1, 9, 3]

    def test_idempotent(self):
        assert substitute([5, 5], 1, 5).tolist() == [5, 5]

    def test_last(self):
        assert substitute([0, 1], 2, 0.5).tolist() == [0, 0.5]

    def test_input_unmodified(self):
        x = np.array([1.0, 2.0])
        substitute(x, 1, 7.0)
        assert x.tolist() == [1.0, 2.0]

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            substitute([1, 2], 3, 0)

    def test_value_outside_interval(self):
        with pytest.raises(DomainError):
            substitute([0.5, 0.5], 1, 2.0, Interval.closed(0, 1))

    @given(st.lists(st.floats(-5, 5), min_size=2, max_size=6), st.data())
    def test_substituting_own_coordinate(self, xs, data):
        k = data.draw(st.integers(1, len(xs)))
        assert substitute(xs, k, xs[k - 1]).tolist() == xs


class TestPermutation:
    def test_reversal_two_is_swap(self):
        assert reversal_permutation(2).map == (2, 1)

    def test_identity_three(self):
        assert identity_permutation(3).map == (1, 2, 3)

    def test_reversal_four(self):
        assert reversal_permutation(4).map == (4, 3, 2, 1)

    def test_small_n_rejected(self):
        with pytest.raises(ValueError):
            identity_permutation(1)

    def test_not_a_bijection(self):
        with pytest.raises(ValueError):
            Permutation((1, 1, 2))

    def test_call_is_one_based(self):
        assert Permutation((3, 1, 2))(1) == 3

    @given(st.permutations(list(range(1, 7))))
    def test_inverse_composes_to_identity(self, perm):
        p = Permutation(tuple(perm))
        assert p.compose(p.inverse()) == Permutation.identity(6)
        assert p.inverse().compose(p) == Permutation.identity(6)

    def test_random_is_seeded(self):
        a = Permutation.random(5, np.random.default_rng(3))
        b = Permutation.random(5, np.random.default_rng(3))
        assert a == b

    @pytest.mark.parametrize(
        "spec,expected",
        [("identity", (1, 2, 3)), ("reversal", (3, 2, 1)), ([2, 3, 1], (2, 3, 1))],
    )
    def test_from_spec(self, spec, expected):
        assert permutation_from_spec(spec, 3).map == expected

    def test_from_spec_size_mismatch(self):
        with pytest.raises(ValueError):
            permutation_from_spec([1, 2], 3)
