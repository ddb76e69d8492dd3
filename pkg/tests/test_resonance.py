"""Exact phase algebra, identity audits, and the support classifier."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wicklab.resonance import (
    FrequencyQuadruple,
    classify_support,
    phase,
    phase_factored,
    sobolev_symbol,
    verify_identities,
)


def quad(n1, n2, n3, n4):
    return FrequencyQuadruple(n1, n2, n3, n4)


zero_sum_quads = st.tuples(
    st.integers(-200, 200), st.integers(-200, 200), st.integers(-200, 200)
).map(lambda t: quad(t[0], t[1], t[2], t[0] - t[1] + t[2]))


class TestPhase:
    def test_second_order_examples(self):
        assert phase(quad(3, 1, 0, 2)) == -4
        assert phase(quad(1, 0, 0, 1)) == 0
        assert phase(quad(5, 5, 7, 7)) == 0

    def test_fourth_order_examples(self):
        assert phase(quad(3, 1, 0, 2), 4) == 64
        assert phase(quad(1, 0, 0, 1), 4) == 0
        assert phase(quad(2, 0, 2, 4), 4) == -224

    def test_zero_sum_enforced(self):
        with pytest.raises(ValueError):
            FrequencyQuadruple(1, 0, 0, 2)

    def test_range_guard(self):
        big = 2**31
        with pytest.raises(OverflowError):
            phase(quad(big, big, 0, 0))

    def test_bad_exponent(self):
        with pytest.raises(ValueError):
            phase(quad(1, 0, 1, 2), 3)

    @given(zero_sum_quads, st.sampled_from([2, 4]))
    @settings(max_examples=200, deadline=None)
    def test_forms_agree_and_resonance(self, q, p):
        value = phase(q, p)  # raises internally if the two forms disagree
        assert value == phase_factored(q, p)
        assert (value == 0) == q.is_resonant


class TestAudit:
    @pytest.mark.parametrize("radius", [1, 8])
    def test_small_radii_clean(self, radius):
        report = verify_identities(radius)
        assert report.total_failures == 0
        assert len(report.failures) == 0

    def test_counts_cover_box(self):
        report = verify_identities(2)
        # zero-sum quadruples with all |n_i| <= 2: direct count
        expected = sum(
            1
            for n1 in range(-2, 3)
            for n2 in range(-2, 3)
            for n3 in range(-2, 3)
            if abs(n1 - n2 + n3) <= 2
        )
        assert report.quadruples_checked == expected

    def test_radius_guard(self):
        with pytest.raises(ValueError):
            verify_identities(0)
        with pytest.raises(ValueError):
            verify_identities(300)


class TestSobolevSymbol:
    def test_all_equal_vanishes(self):
        assert sobolev_symbol(quad(3, 3, 3, 3), -0.3) == 0.0

    @given(zero_sum_quads)
    @settings(max_examples=100, deadline=None)
    def test_s_zero_vanishes(self, q):
        assert sobolev_symbol(q, 0.0) == 0.0

    def test_worked_value(self):
        value = sobolev_symbol(quad(1, 0, 2, 3), -0.5)
        expected = 1 / np.sqrt(2) - 1 + 1 / np.sqrt(5) - 1 / np.sqrt(10)
        assert value == pytest.approx(expected, abs=1e-12)
        assert value == pytest.approx(-0.161907, abs=1e-6)

    @given(zero_sum_quads, st.floats(-0.5, 0.5))
    @settings(max_examples=100, deadline=None)
    def test_antisymmetry_under_pair_swap(self, q, s):
        swapped = quad(q.n2, q.n1, q.n4, q.n3)
        assert sobolev_symbol(swapped, s) == pytest.approx(-sobolev_symbol(q, s), abs=1e-12)

    def test_vanishes_on_matching_multisets(self):
        for q in (quad(4, 4, -7, -7), quad(4, -7, -7, 4), quad(2, 2, 9, 9)):
            assert {q.n1, q.n3} == {q.n2, q.n4}
            assert sobolev_symbol(q, -0.21) == pytest.approx(0.0, abs=1e-14)


class TestClassifier:
    def test_case_ii_example(self):
        res = classify_support(quad(1, -97, 2, 100), -0.125)
        assert res.case == "ii"
        assert res.phi_abs == 19404
        assert res.comparison == 10000.0
        assert res.ratio == pytest.approx(1.9404)

    def test_case_iv_example(self):
        # all magnitudes within a factor 2 and |phase| < largest frequency
        q = quad(20, 21, 22, 21)
        assert abs(phase(q)) == 2 < 22
        res = classify_support(q, -0.125)
        assert res.case == "iv"

    def test_mixed_high_triple(self):
        # three comparable magnitudes over one small: the classifier calls
        # this (iii); the thresholds are strict, so no (i) pattern fires here
        res = classify_support(quad(100, 1, 101, 200), -0.125)
        assert res.case == "iii"
        assert res.phi_abs == 19800

    def test_resonant_flagged(self):
        res = classify_support(quad(3, 1, 1, 3), -0.125)
        assert res.case == "resonant"

    def test_case_i_example(self):
        # high pair {n4, n3}, both lows truly dominated
        q = quad(2, -1, 101, 104)
        res = classify_support(q, -0.125)
        assert res.case == "i"
        assert res.comparison == 104.0 * abs(-1 - 2)

    def test_case_iv_implies_comparable(self):
        # swept surrogate: whenever |phase| < n1*, max/min bracket ratio <= 4
        rng = range(-12, 13)
        for n1 in rng:
            for n2 in rng:
                for n3 in rng:
                    n4 = n1 - n2 + n3
                    if abs(n4) > 12 or n4 == n1 or n4 == n3:
                        continue
                    res = classify_support(quad(n1, n2, n3, n4), -0.1)
                    if res.case == "iv":
                        mags = [abs(v) for v in (n1, n2, n3, n4)]
                        brackets = np.sqrt(1.0 + np.array(mags, dtype=float) ** 2)
                        assert max(mags) / min(brackets) <= 4.0
