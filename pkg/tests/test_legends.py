"""Label decision rules: thresholds, majorities, and partition protocols."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subsample_lab.legends import (
    BinaryThreshold,
    Label,
    Majority,
    aggregate_majority_two_stage,
    aggregate_mtt,
    aggregate_ttm,
    decide,
    legend_from_dict,
    legend_to_dict,
)

FOREST = BinaryThreshold([1], 0.10)


def proportion_rows(shares):
    """Two-class cell matrix from the target-class share of each cell."""
    shares = np.asarray(shares, dtype=float)
    return np.column_stack([1.0 - shares, shares])


# One 4x4 partition cell fully covered plus a 3x3 corner of the next cell:
# cell target shares (1.0, 0.5625, 0, ..., 0), unit purity 25/144.
COMPACT_SHARES = [1.0, 0.5625, 0, 0, 0, 0, 0, 0, 0]
# The same 27 target pixels spread as 3 per cell: every share is 3/16.
SCATTERED_SHARES = [0.1875] * 9


class TestDecide:
    def test_binary_is_inclusive_at_the_threshold(self):
        assert decide([0.90, 0.10], FOREST).value is True
        assert decide([0.9001, 0.0999], FOREST).value is False

    def test_binary_pure_cases(self):
        assert decide([0.0, 1.0], FOREST).value is True
        assert decide([1.0, 0.0], FOREST).value is False

    def test_binary_sums_multiple_target_classes(self):
        legend = BinaryThreshold([0, 2], 0.5)
        assert decide([0.3, 0.4, 0.3], legend).value is True
        assert decide([0.3, 0.5, 0.2], legend).value is True  # 0.5 >= 0.5
        assert decide([0.2, 0.6, 0.2], legend).value is False

    def test_majority_picks_most_frequent_class(self):
        label = decide([0.2, 0.3, 0.5], Majority())
        assert label.value == 2 and not label.tie_flag

    def test_majority_tie_goes_to_lowest_index_and_is_flagged(self):
        label = decide([0.4, 0.4, 0.2], Majority())
        assert label.value == 0 and label.tie_flag

    def test_target_class_out_of_range_raises(self):
        with pytest.raises(ValueError):
            decide([0.5, 0.5], BinaryThreshold([3], 0.5))

    @given(share=st.floats(0.01, 0.99),
           t1=st.floats(0.05, 0.95), t2=st.floats(0.05, 0.95))
    @settings(max_examples=60, deadline=None)
    def test_presence_is_monotone_in_the_threshold(self, share, t1, t2):
        lo, hi = sorted((t1, t2))
        p = [1 - share, share]
        if decide(p, BinaryThreshold([1], hi)).value:
            assert decide(p, BinaryThreshold([1], lo)).value

    @given(p_rest=st.lists(st.floats(0.01, 1.0), min_size=2, max_size=5),
           share=st.floats(0.0, 1.0))
    @settings(max_examples=60, deadline=None)
    def test_binary_ignores_how_non_target_mass_is_split(self, p_rest, share):
        # two distributions with the same target share must label identically
        rest = np.asarray(p_rest)
        rest = rest / rest.sum() * (1 - share)
        legend = BinaryThreshold([0], 0.35)
        even = np.concatenate([[share], np.full(rest.size, (1 - share) / rest.size)])
        skew = np.concatenate([[share], rest])
        assert decide(even, legend).value == decide(skew, legend).value


class TestThresholdThenMajority:
    def test_compact_patch_is_missed(self):
        # only 2 of 9 cells clear the threshold, so the vote says absent even
        # though the unit's true share (25/144) is above it
        label = aggregate_ttm(proportion_rows(COMPACT_SHARES), FOREST)
        assert label.value is False
        assert decide([119 / 144, 25 / 144], FOREST).value is True

    def test_scattered_pixels_are_caught(self):
        label = aggregate_ttm(proportion_rows(SCATTERED_SHARES), FOREST)
        assert label.value is True

    def test_exact_half_vote_falls_back_to_absent_with_flag(self):
        label = aggregate_ttm(proportion_rows([0.9, 0.8, 0.0, 0.05]), FOREST)
        assert label.value is False and label.tie_flag

    def test_requires_binary_legend(self):
        with pytest.raises(TypeError):
            aggregate_ttm(proportion_rows([0.5]), Majority())


class TestMajorityThenThreshold:
    def test_compact_patch_is_caught(self):
        # 2 of 9 cells have a target majority; 2/9 >= 0.10 means present
        label = aggregate_mtt(proportion_rows(COMPACT_SHARES), FOREST)
        assert label.value is True

    def test_scattered_pixels_are_missed(self):
        # no cell reaches a target majority, so the fraction is 0 < 0.10
        label = aggregate_mtt(proportion_rows(SCATTERED_SHARES), FOREST)
        assert label.value is False

    def test_pure_non_target_is_absent(self):
        label = aggregate_mtt(proportion_rows([0.0] * 9), FOREST)
        assert label.value is False and not label.tie_flag

    def test_cell_at_exactly_one_half_is_not_a_majority_and_flags(self):
        label = aggregate_mtt(proportion_rows([0.5, 0.0, 0.0]), FOREST)
        assert label.value is False and label.tie_flag

    def test_requires_binary_legend(self):
        with pytest.raises(TypeError):
            aggregate_mtt(proportion_rows([0.5]), Majority())


class TestTwoStageMajority:
    def test_pure_cells_vote_their_class(self):
        cells = np.zeros((4, 3))
        cells[:, 2] = 1.0
        assert aggregate_majority_two_stage(cells).value == 2

    def test_cell_majorities_decide_the_vote(self):
        cells = np.array([
            [0.6, 0.3, 0.1],
            [0.5, 0.3, 0.2],
            [0.1, 0.8, 0.1],
            [0.2, 0.2, 0.6],
        ])
        label = aggregate_majority_two_stage(cells)
        assert label.value == 0 and not label.tie_flag

    def test_narrow_cell_majorities_can_override_the_area_majority(self):
        # three cells lean 51/49 to class 0, two are pure class 1: the vote
        # says 0 while the pooled proportions (0.306, 0.694) say 1
        cells = np.array([[0.51, 0.49]] * 3 + [[0.0, 1.0]] * 2)
        assert aggregate_majority_two_stage(cells).value == 0
        pooled = cells.mean(axis=0)
        assert decide(pooled, Majority()).value == 1

    def test_vote_tie_breaks_low_and_flags(self):
        cells = np.array([[1.0, 0.0], [0.0, 1.0]])
        label = aggregate_majority_two_stage(cells)
        assert label.value == 0 and label.tie_flag

    def test_cell_level_tie_sets_the_flag(self):
        cells = np.array([[0.5, 0.5], [0.9, 0.1], [0.8, 0.2]])
        label = aggregate_majority_two_stage(cells)
        assert label.value == 0 and label.tie_flag

    def test_rejects_empty_input(self):
        with pytest.raises(ValueError):
            aggregate_majority_two_stage(np.empty((0, 2)))


class TestProtocolIdentityAtFiftyPercent:
    @given(shares=st.lists(
        st.floats(0.0, 1.0).filter(lambda v: abs(v - 0.5) > 1e-9),
        min_size=1, max_size=25))
    @settings(max_examples=120, deadline=None)
    def test_ttm_equals_mtt_outside_tie_sets(self, shares):
        legend = BinaryThreshold([1], 0.5)
        cells = proportion_rows(shares)
        ttm = aggregate_ttm(cells, legend)
        mtt = aggregate_mtt(cells, legend)
        if not (ttm.tie_flag or mtt.tie_flag):
            assert ttm.value == mtt.value

    def test_protocols_differ_away_from_fifty_percent(self):
        cells = proportion_rows(COMPACT_SHARES)
        assert (aggregate_ttm(cells, FOREST).value
                != aggregate_mtt(cells, FOREST).value)


class TestLegendObjects:
    def test_names_are_stable(self):
        assert BinaryThreshold([1], 0.5).name == "binary-c1-t0.5"
        assert BinaryThreshold([0, 2], 0.1).name == "binary-c0+2-t0.1"
        assert Majority().name == "majority"

    def test_validation(self):
        with pytest.raises(ValueError):
            BinaryThreshold([], 0.5)
        with pytest.raises(ValueError):
            BinaryThreshold([1], 0.0)
        with pytest.raises(ValueError):
            BinaryThreshold([1], 1.0)
        with pytest.raises(ValueError):
            BinaryThreshold([-1], 0.5)

    def test_serialization_roundtrip(self):
        for legend in (BinaryThreshold([1], 0.25), BinaryThreshold([0, 3], 0.5),
                       Majority()):
            assert legend_from_dict(legend_to_dict(legend)) == legend

    def test_from_dict_rejects_unknown_type(self):
        with pytest.raises(ValueError):
            legend_from_dict({"type": "gradient"})

    def test_labels_are_value_objects(self):
        assert Label(True) == Label(True)
        assert Label(2, tie_flag=True) != Label(2)
