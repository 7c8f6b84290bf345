import math

import numpy as np
import pytest

import oracles
from conftest import make_scores, random_ground_truth, random_normalized
from gbqeval.core import (
    ArrangedScores,
    MeasureParams,
    Ranking,
    arrange_by_ground_truth,
    rank_descending,
)
from gbqeval.errors import InputValidationError, UndefinedMeasureError
from gbqeval.measures import (
    MeasureRecord,
    acceptance_score,
    advanced_acceptance,
    advanced_acceptance_reference,
    normalized_advanced_acceptance,
    penalty_entanglement,
    penalty_trend,
    rank_deviation,
    relevance_per_gesture,
    relevance_total,
    trend_match,
)

S2 = math.sqrt(2.0) / 2.0

# shared three-gesture fixture: scores are a permutation of the truth
GT3 = make_scores([S2, 0.0, -S2], ids=("g1", "g2", "g3"), state="ground_truth")
D3 = make_scores([S2, -S2, 0.0], ids=("g1", "g2", "g3"))


def ranking(ids, ranks):
    return Ranking(dict(zip(ids, ranks)))


class TestRankDeviation:
    def test_identical_is_zero(self):
        r = ranking("abcd", (1, 2, 3, 4))
        assert rank_deviation(r, r) == 0.0

    def test_full_reversal_g4(self):
        out = ranking("abcd", (1, 2, 3, 4))
        gt = ranking("abcd", (4, 3, 2, 1))
        assert rank_deviation(out, gt) == pytest.approx(2.0)

    def test_g3_single_swap(self):
        out = ranking("abc", (1, 3, 2))
        gt = ranking("abc", (1, 2, 3))
        assert rank_deviation(out, gt) == pytest.approx(2.0 / 3.0)

    def test_symmetry_and_reversal_property(self, rng):
        for _ in range(50):
            g = int(rng.integers(2, 12))
            a = rank_descending(random_normalized(rng, g))
            b = rank_descending(random_normalized(rng, g))
            assert rank_deviation(a, b) == pytest.approx(rank_deviation(b, a))
        for g in (2, 4, 6, 8, 10):
            fwd = ranking([f"x{i}" for i in range(g)], range(1, g + 1))
            rev = ranking([f"x{i}" for i in range(g)], range(g, 0, -1))
            assert rank_deviation(fwd, rev) == pytest.approx(g / 2.0)

    def test_mismatched_ids_rejected(self):
        with pytest.raises(InputValidationError):
            rank_deviation(ranking("ab", (1, 2)), ranking("ac", (1, 2)))


class TestRelevance:
    ARR4 = ArrangedScores(np.array([-0.5, -0.2, 0.3, 0.8]), ("w", "x", "y", "z"))

    def test_top_rank_example(self):
        assert relevance_per_gesture(self.ARR4, 1) == pytest.approx(1.65, abs=1e-9)

    def test_bottom_rank_example(self):
        assert relevance_per_gesture(self.ARR4, 4) == pytest.approx(1.25, abs=1e-9)

    def test_zero_scores_reduce_to_rank_fraction(self):
        arr = ArrangedScores(np.zeros(4), ("a", "b", "c", "d"))
        for r in range(1, 5):
            assert relevance_per_gesture(arr, r) == pytest.approx(r / 4.0)

    def test_rank_out_of_range(self):
        with pytest.raises(InputValidationError):
            relevance_per_gesture(self.ARR4, 5)

    def test_total_all_zero(self):
        delta = make_scores([0.0, 0.0, 0.0, 0.0])
        gt = ranking(delta.gesture_ids, (1, 2, 3, 4))
        assert relevance_total(delta, gt) == pytest.approx(2.5)

    def test_total_fixture(self):
        # per-term oracle: 1.65 + 0.8 + 0.7 + 1.25
        delta = make_scores([0.8, 0.3, -0.2, -0.5], ids=("a", "b", "c", "d"))
        gt = ranking(("a", "b", "c", "d"), (1, 2, 3, 4))
        assert relevance_total(delta, gt) == pytest.approx(4.4, abs=1e-9)

    def test_total_matches_per_gesture_sum(self, rng):
        for _ in range(30):
            g = int(rng.integers(2, 10))
            delta = random_normalized(rng, g)
            gt = rank_descending(random_ground_truth(rng, g))
            arranged = arrange_by_ground_truth(delta, gt)
            expected = sum(relevance_per_gesture(arranged, r) for r in range(1, g + 1))
            assert relevance_total(delta, gt) == pytest.approx(expected, abs=1e-12)

    def test_raising_top_score_raises_total(self):
        delta = make_scores([0.8, 0.3, -0.2, -0.5], ids=("a", "b", "c", "d"))
        bumped = make_scores([0.9, 0.3, -0.2, -0.5], ids=("a", "b", "c", "d"))
        gt = ranking(("a", "b", "c", "d"), (1, 2, 3, 4))
        assert relevance_total(bumped, gt) > relevance_total(delta, gt)


class TestTrendMatch:
    def test_perfect_match_is_zero(self):
        gt_rank = rank_descending(GT3)
        arr = arrange_by_ground_truth(GT3, gt_rank)
        out = trend_match(arr, arr)
        assert out.total == 0.0
        assert np.all(out.forward_errors == 0.0)
        assert np.all(out.backward_errors == 0.0)

    def test_three_gesture_example(self):
        e = ArrangedScores(np.array([-S2, 0.0, S2]), ("c", "b", "a"))
        d = ArrangedScores(np.array([-S2, S2, 0.0]), ("c", "b", "a"))
        out = trend_match(d, e)
        assert out.total == pytest.approx(3.18198051533946, abs=1e-9)
        np.testing.assert_allclose(out.forward_errors, [S2, 2 * S2], atol=1e-12)
        np.testing.assert_allclose(out.backward_errors, [S2, 2 * S2], atol=1e-12)

    def test_translation_invariance(self, rng):
        for _ in range(30):
            g = int(rng.integers(2, 10))
            order = tuple(f"g{i}" for i in range(g))
            d = rng.standard_normal(g)
            e = rng.standard_normal(g)
            base = trend_match(ArrangedScores(d, order), ArrangedScores(e, order)).total
            shifted_d = trend_match(ArrangedScores(d + 3.7, order), ArrangedScores(e, order)).total
            shifted_e = trend_match(ArrangedScores(d, order), ArrangedScores(e - 1.9, order)).total
            assert shifted_d == pytest.approx(base, abs=1e-9)
            assert shifted_e == pytest.approx(base, abs=1e-9)

    def test_pass_symmetry_exact(self, rng):
        for _ in range(100):
            g = int(rng.integers(2, 12))
            order = tuple(f"g{i}" for i in range(g))
            out = trend_match(
                ArrangedScores(rng.standard_normal(g), order),
                ArrangedScores(rng.standard_normal(g), order),
            )
            # backward error at j equals forward error at j+1, exactly
            np.testing.assert_array_equal(out.backward_errors, out.forward_errors)

    def test_closed_form_equivalence(self, rng):
        for _ in range(200):
            g = int(rng.integers(2, 13))
            order = tuple(f"g{i}" for i in range(g))
            d = rng.standard_normal(g)
            e = rng.standard_normal(g)
            two_pass = trend_match(ArrangedScores(d, order), ArrangedScores(e, order)).total
            assert two_pass == pytest.approx(oracles.trend_closed_form(d, e), abs=1e-12)

    def test_single_gesture_undefined(self):
        one = ArrangedScores(np.array([0.0]), ("a",))
        with pytest.raises(UndefinedMeasureError):
            trend_match(one, one)

    def test_provenance_mismatch_rejected(self):
        a = ArrangedScores(np.array([0.0, 1.0]), ("a", "b"))
        b = ArrangedScores(np.array([0.0, 1.0]), ("b", "a"))
        with pytest.raises(InputValidationError):
            trend_match(a, b)


class TestPenalties:
    def test_identity_points(self):
        assert penalty_entanglement(0.0) == 1.0
        assert penalty_trend(0.0) == 1.0

    def test_entanglement_example(self):
        assert penalty_entanglement(0.123) == pytest.approx(0.911877151758615, abs=1e-9)

    def test_trend_example(self):
        assert penalty_trend(2.0) == pytest.approx(S2, abs=1e-9)

    def test_ranges(self, rng):
        for _ in range(50):
            c = float(rng.uniform(0.0, 5.0))
            p = float(rng.uniform(0.0, 20.0))
            assert 0.0 < penalty_entanglement(c) <= 1.0
            assert 0.0 < penalty_trend(p) <= 1.0

    def test_negative_inputs_rejected(self):
        with pytest.raises(InputValidationError):
            penalty_entanglement(-0.1)
        with pytest.raises(InputValidationError):
            penalty_trend(-0.1)


class TestAcceptanceScore:
    def test_two_gesture_zero_diff_closed_form(self):
        # rankings agree, so both guards floor at 1; at G=2 the terms are
        # 2^(lambda*(1.5*d1 + 0.5)) and 2^(lambda*1)
        delta = make_scores([0.76, -0.76], ids=("a", "b"))
        gt = make_scores([S2, -S2], ids=("a", "b"), state="ground_truth")
        expected = 2.0 ** (2.0 * (1.5 * 0.76 + 0.5)) + 2.0**2.0
        assert acceptance_score(delta, gt) == pytest.approx(expected, rel=1e-12)

    def test_matches_naive_oracle(self, rng):
        for _ in range(100):
            g = int(rng.integers(2, 10))
            delta = random_normalized(rng, g)
            gt = random_ground_truth(rng, g)
            expected = oracles.acceptance_naive(list(delta.values), list(gt.values))
            assert acceptance_score(delta, gt) == pytest.approx(expected, rel=1e-12)

    def test_guard_keeps_exact_matches_whole(self):
        # identical rankings: every term divides by max(1, 0) = 1
        got = acceptance_score(GT3, GT3)
        rel_sum = advanced_acceptance_reference(GT3)
        assert got == pytest.approx(rel_sum, rel=1e-12)

    def test_larger_rank_diff_shrinks_terms(self):
        aligned = acceptance_score(GT3, GT3)
        shuffled = acceptance_score(D3, GT3)
        assert shuffled < aligned


class TestAdvancedAcceptance:
    def test_perfect_scores_reduce_to_relevance_sum(self):
        got = advanced_acceptance(GT3, GT3, 0.0)
        assert got == pytest.approx(advanced_acceptance_reference(GT3), rel=1e-12)

    def test_frozen_fixture_value(self):
        # independently derived by direct transcription of the formulas
        assert advanced_acceptance(D3, GT3, 0.2) == pytest.approx(
            5.63493212607981, abs=1e-9
        )

    def test_matches_naive_oracle(self, rng):
        for _ in range(100):
            g = int(rng.integers(2, 10))
            delta = random_normalized(rng, g)
            gt = random_ground_truth(rng, g)
            c_d = float(rng.uniform(0.0, 1.0))
            expected = oracles.advanced_naive(list(delta.values), list(gt.values), c_d)
            assert advanced_acceptance(delta, gt, c_d) == pytest.approx(expected, rel=1e-12)

    def test_strictly_decreasing_in_entanglement(self):
        values = [advanced_acceptance(D3, GT3, c) for c in (0.0, 0.2, 0.5, 1.0)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_missing_entanglement_treated_as_zero(self):
        assert advanced_acceptance(D3, GT3, None) == advanced_acceptance(D3, GT3, 0.0)

    def test_non_increasing_in_penalty_factors(self):
        base = MeasureParams()
        for name in ("kappa", "nu", "beta"):
            lo = advanced_acceptance(D3, GT3, 0.3, base.replace(**{name: 0.5}))
            hi = advanced_acceptance(D3, GT3, 0.3, base.replace(**{name: 2.0}))
            assert hi < lo  # strict: rank diffs, trend, and c_d all nonzero


class TestNormalizedAdvancedAcceptance:
    def test_fixpoint_is_exactly_one(self):
        assert normalized_advanced_acceptance(GT3, GT3, 0.0) == 1.0

    def test_entanglement_only_deviation(self):
        got = normalized_advanced_acceptance(GT3, GT3, 0.5)
        assert got == pytest.approx(0.687289278790972, abs=1e-9)

    def test_frozen_fixture_value(self):
        assert normalized_advanced_acceptance(D3, GT3, 0.2) == pytest.approx(
            0.347875643021365, abs=1e-9
        )

    def test_always_positive(self, rng):
        for _ in range(50):
            g = int(rng.integers(2, 10))
            delta = random_normalized(rng, g)
            gt = random_ground_truth(rng, g)
            assert normalized_advanced_acceptance(delta, gt, float(rng.uniform(0, 2))) > 0.0

    def test_degenerate_ground_truth_rejected(self):
        degenerate = make_scores([0.0, 0.0, 0.0], state="ground_truth")
        degenerate.degenerate = True
        with pytest.raises(UndefinedMeasureError):
            normalized_advanced_acceptance(D3, degenerate, 0.0)


class TestMeasureRecord:
    def test_value_lookup_covers_fields_baselines_extras(self):
        record = MeasureRecord(run_id="r")
        record.set_value("rank_dev", 0.5, "computed")
        record.baselines["dcg"] = 2.0
        record.set_value("crit_trend", 1.5, "replayed")
        assert record.value("rank_dev") == 0.5
        assert record.value("dcg") == 2.0
        assert record.value("crit_trend") == 1.5
        assert record.value("never_set") is None
        assert record.provenance["rank_dev"] == "computed"
