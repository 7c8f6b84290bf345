import math

import numpy as np
import pytest

from conftest import make_scores, random_ground_truth, random_normalized
from gbqeval.baselines import (
    BASELINE_DIRECTIONS,
    BASELINE_KINDS,
    GradeMap,
    all_baselines,
    baseline_measure,
)
from gbqeval.errors import InputValidationError

S2 = math.sqrt(2.0) / 2.0


def tie_free_pair(rng, g):
    while True:
        delta = random_normalized(rng, g)
        gt = random_ground_truth(rng, g)
        if len(set(delta.values)) == g and len(set(gt.values)) == g:
            return delta, gt


class TestIdentityCases:
    def test_rmse_cosine_tau_rpp(self):
        x = make_scores([S2, 0.0, -S2], state="ground_truth")
        assert baseline_measure("rmse", x, x) == 0.0
        assert baseline_measure("kendall_tau", x, x) == 0.0
        assert baseline_measure("rpp", x, x) == 1.0
        assert baseline_measure("cosine", x, x) == pytest.approx(1.0, abs=1e-12)

    def test_cosine_identity_exact_on_dyadic_vector(self):
        x = make_scores([0.5, 0.5, -0.5, -0.5], state="ground_truth")
        assert baseline_measure("cosine", x, x) == 1.0

    def test_gre_identity(self):
        x = make_scores([S2, 0.0, -S2], state="ground_truth")
        assert baseline_measure("gre", x, x) == 0.0


class TestKendallAndRpp:
    def test_full_reversal_g3(self):
        gt = make_scores([S2, 0.0, -S2], state="ground_truth")
        delta = make_scores([-S2, 0.0, S2])
        assert baseline_measure("kendall_tau", delta, gt) == 3.0
        assert baseline_measure("rpp", delta, gt) == 0.0

    def test_complementarity_without_ties(self, rng):
        for _ in range(200):
            g = int(rng.integers(2, 10))
            delta, gt = tie_free_pair(rng, g)
            tau = baseline_measure("kendall_tau", delta, gt)
            rpp = baseline_measure("rpp", delta, gt)
            pairs = g * (g - 1) / 2
            assert rpp + tau / pairs == pytest.approx(1.0, abs=1e-12)

    def test_ties_count_as_neither(self):
        gt = make_scores([0.5, 0.0, -0.5], state="ground_truth")
        delta = make_scores([0.3, 0.3, -0.6])
        # pair (g1, g2) ties in delta: 2 decided pairs, both concordant
        assert baseline_measure("kendall_tau", delta, gt) == 0.0
        assert baseline_measure("rpp", delta, gt) == pytest.approx(2.0 / 3.0)


class TestDcgFamily:
    def test_dcg_example(self):
        # gains (1.0, 0.5, 0.0) in candidate order
        gt = make_scores([1.0, 0.0, -1.0], state="ground_truth")
        delta = make_scores([0.9, 0.5, 0.1])
        assert baseline_measure("dcg", delta, gt) == pytest.approx(
            1.31546487678573, abs=1e-9
        )

    def test_dcg_penalizes_adjacent_bad_swap(self, rng):
        for _ in range(50):
            g = int(rng.integers(3, 9))
            delta, gt = tie_free_pair(rng, g)
            base = baseline_measure("dcg", delta, gt)
            # swap two adjacent candidate positions against gain order
            from gbqeval.core import rank_descending

            order = list(rank_descending(delta).gestures_by_rank())
            gains = [(gt.value_of(gid) + 1.0) / 2.0 for gid in order]
            k = next((i for i in range(g - 1) if gains[i] > gains[i + 1]), None)
            if k is None:
                continue
            swapped_values = {gid: delta.value_of(gid) for gid in delta.gesture_ids}
            a, b = order[k], order[k + 1]
            swapped_values[a], swapped_values[b] = swapped_values[b], swapped_values[a]
            swapped = make_scores(
                [swapped_values[gid] for gid in delta.gesture_ids],
                ids=delta.gesture_ids,
            )
            assert baseline_measure("dcg", swapped, gt) <= base + 1e-12

    def test_neg_rel_dcg_admits_negative_gains(self):
        gt = make_scores([S2, 0.0, -S2], state="ground_truth")
        delta = make_scores([-S2, 0.0, S2])
        # worst gesture first: signed gain -S2 at discount 1
        expected = -S2 + 0.0 + S2 / 2.0
        assert baseline_measure("neg_rel_dcg", delta, gt) == pytest.approx(expected, abs=1e-12)


class TestErrAndUMeasure:
    def test_err_in_unit_interval(self, rng):
        for _ in range(100):
            g = int(rng.integers(2, 10))
            delta, gt = tie_free_pair(rng, g)
            assert 0.0 <= baseline_measure("err", delta, gt) <= 1.0

    def test_err_perfect_first_hit(self):
        # top gesture graded g_max stops with probability 15/16 at k=1
        gt = make_scores([S2, 0.0, -S2], state="ground_truth")
        err = baseline_measure("err", gt, gt)
        grades = GradeMap()
        r = [
            (2.0 ** grades.grade(v) - 1.0) / 2.0**4
            for v in sorted(gt.values, reverse=True)
        ]
        expected = r[0] + (1 / 2) * r[1] * (1 - r[0]) + (1 / 3) * r[2] * (1 - r[0]) * (1 - r[1])
        assert err == pytest.approx(expected, abs=1e-12)

    def test_u_measure_weights_decay(self):
        gt = make_scores([1.0, 0.0, -1.0], state="ground_truth")
        delta = make_scores([0.9, 0.5, 0.1])
        # gains (1.0, 0.5, 0.0), weights (1, 2/3, 1/3)
        assert baseline_measure("u_measure", delta, gt) == pytest.approx(
            1.0 + 0.5 * (2.0 / 3.0), abs=1e-12
        )


class TestGre:
    def test_discounts_low_ranks(self):
        gt = make_scores([0.6, 0.3, 0.0, -0.9], state="ground_truth")
        # one swap at the top vs the same swap at the bottom
        top_swap = make_scores([0.3, 0.6, 0.0, -0.9])
        bottom_swap = make_scores([0.6, 0.3, -0.9, 0.0])
        assert baseline_measure("gre", top_swap, gt) > baseline_measure(
            "gre", bottom_swap, gt
        )

    def test_invariant_under_monotone_transform(self, rng):
        for _ in range(50):
            g = int(rng.integers(2, 9))
            delta, gt = tie_free_pair(rng, g)
            warped = make_scores(
                np.tanh(delta.values) * 0.5 + 0.1, ids=delta.gesture_ids
            )
            assert baseline_measure("gre", warped, gt) == baseline_measure(
                "gre", delta, gt
            )


class TestInfAp:
    def test_perfect_ranking_is_one(self):
        gt = make_scores([0.6, 0.3, 0.0, -0.9], state="ground_truth")
        assert baseline_measure("inf_ap", gt, gt) == 1.0

    def test_half_relevant_worst_case(self):
        gt = make_scores([0.6, 0.3, 0.0, -0.9], state="ground_truth")
        reversed_delta = make_scores([-0.9, 0.0, 0.3, 0.6])
        # relevant = top 2 by gt, retrieved at positions 3 and 4
        expected = (1.0 / 3.0 + 2.0 / 4.0) / 2.0
        assert baseline_measure("inf_ap", reversed_delta, gt) == pytest.approx(
            expected, abs=1e-12
        )


class TestGradeMap:
    def test_mapping_and_clamping(self):
        grades = GradeMap()
        assert grades.grade(1.0) == 4
        assert grades.grade(-1.0) == 0
        assert grades.grade(0.0) == 2
        assert grades.grade(2.0) == 4  # clamped above
        assert grades.grade(-2.0) == 0  # clamped below

    def test_custom_g_max(self):
        grades = GradeMap(g_max=10)
        assert grades.grade(0.0) == 5

    def test_invalid_g_max(self):
        with pytest.raises(InputValidationError):
            GradeMap(g_max=0)


class TestDispatch:
    def test_unknown_kind_rejected(self):
        x = make_scores([S2, -S2])
        with pytest.raises(InputValidationError):
            baseline_measure("ndcg", x, x)

    def test_mismatched_ids_rejected(self):
        a = make_scores([S2, -S2], ids=("a", "b"))
        b = make_scores([S2, -S2], ids=("a", "c"), state="ground_truth")
        with pytest.raises(InputValidationError):
            baseline_measure("rmse", a, b)

    def test_pairwise_kinds_need_two_gestures(self):
        from gbqeval.errors import UndefinedMeasureError

        one = make_scores([0.0], ids=("a",))
        for kind in ("kendall_tau", "rpp"):
            with pytest.raises(UndefinedMeasureError):
                baseline_measure(kind, one, one)

    def test_directions_cover_all_kinds(self):
        assert set(BASELINE_DIRECTIONS) == set(BASELINE_KINDS)
        assert BASELINE_DIRECTIONS["rmse"] == "min"
        assert BASELINE_DIRECTIONS["kendall_tau"] == "min"
        assert BASELINE_DIRECTIONS["gre"] == "min"
        assert all(
            BASELINE_DIRECTIONS[k] == "max"
            for k in BASELINE_KINDS
            if k not in ("rmse", "kendall_tau", "gre")
        )

    def test_all_baselines_ordering(self, rng):
        delta, gt = tie_free_pair(rng, 5)
        out = all_baselines(delta, gt)
        assert tuple(out) == BASELINE_KINDS
