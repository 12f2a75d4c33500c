import math

import numpy as np
import pytest

import clfe
from clfe.errors import KTooLarge, LengthMismatch, TooFewSamplesForThermal, ZeroThermal

from helpers import assert_valid_partition, graph_for_method, random_labeled_instance


def brute_force_neighbors(values, k, j, labels=None):
    """Exhaustive kNN oracle: full pairwise distances, sorted with
    (distance, index) keys, optionally restricted to the same class."""
    n = values.shape[1]
    candidates = []
    for i in range(n):
        if i == j:
            continue
        if labels is not None and labels[i] != labels[j]:
            continue
        candidates.append((float(np.linalg.norm(values[:, i] - values[:, j])), i))
    candidates.sort()
    return [i for _, i in candidates[:k]]


class TestNeighborIndex:
    def test_three_point_line(self):
        X = clfe.DataMatrix(np.array([[0.0, 1.0, 10.0]]))
        idx = clfe.build_neighbor_index(X, 1)
        assert idx.neighbors[:, 0].tolist() == [1, 0, 1]
        assert idx.seventh_distance is None  # n < 8

    def test_supervised_singleton_class_rejected(self):
        X = clfe.DataMatrix(np.array([[0.0, 1.0, 10.0]]))
        labels = clfe.LabelVector([1, 1, 2])
        with pytest.raises(KTooLarge):
            clfe.build_neighbor_index(X, 1, labels)

    def test_supervised_pairs(self):
        X = clfe.DataMatrix(np.array([[0.0, 1.0, 10.0, 11.0]]))
        labels = clfe.LabelVector([1, 1, 2, 2])
        idx = clfe.build_neighbor_index(X, 1, labels)
        assert idx.neighbors[:, 0].tolist() == [1, 0, 3, 2]

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(77)
        values = rng.standard_normal((3, 10))
        idx = clfe.build_neighbor_index(clfe.DataMatrix(values), 3)
        for j in range(10):
            assert idx.neighbors[j].tolist() == brute_force_neighbors(values, 3, j)

    def test_supervised_matches_brute_force_oracle(self):
        rng = np.random.default_rng(78)
        values = rng.standard_normal((3, 12))
        labels = np.array([1, 2] * 6)
        idx = clfe.build_neighbor_index(
            clfe.DataMatrix(values), 2, clfe.LabelVector(labels)
        )
        for j in range(12):
            assert idx.neighbors[j].tolist() == brute_force_neighbors(
                values, 2, j, labels
            )

    def test_distance_ties_broken_by_index(self):
        # three points equidistant from the origin sample
        X = clfe.DataMatrix(
            np.array([[0.0, 1.0, -1.0, 0.0], [0.0, 0.0, 0.0, 1.0]])
        )
        idx = clfe.build_neighbor_index(X, 3)
        assert idx.neighbors[0].tolist() == [1, 2, 3]

    def test_k_too_large(self):
        X = clfe.DataMatrix(np.ones((2, 4)) * np.arange(4))
        with pytest.raises(KTooLarge):
            clfe.build_neighbor_index(X, 4)


class TestThermalWeight:
    def test_seventh_neighbor_line_example(self):
        # evenly spaced 1-D points 0..8; oracle: the 7th neighbor of point 0
        # is point 7 (distance 7), of point 1 is point 7 (distance 6)
        X = clfe.DataMatrix(np.arange(9.0)[None, :])
        idx = clfe.build_neighbor_index(X, 1)
        d_sorted_0 = sorted(abs(0 - x) for x in range(1, 9))
        d_sorted_1 = sorted(abs(1 - x) for x in range(9) if x != 1)
        assert idx.seventh_distance[0] == d_sorted_0[6] == 7.0
        assert idx.seventh_distance[1] == d_sorted_1[6] == 6.0
        w = clfe.thermal_weight(X, idx, 0, 1)
        assert w == pytest.approx(math.exp(-1.0 / 42.0), abs=1e-15)

    def test_duplicate_pair_gives_weight_one(self):
        values = np.arange(9.0)[None, :].copy()
        values[0, 1] = values[0, 0]  # duplicate pair, others distinct
        X = clfe.DataMatrix(values)
        idx = clfe.build_neighbor_index(X, 1)
        assert clfe.thermal_weight(X, idx, 0, 1) == 1.0

    def test_weight_in_unit_interval(self):
        rng = np.random.default_rng(5)
        X = clfe.DataMatrix(rng.standard_normal((4, 20)))
        idx = clfe.build_neighbor_index(X, 3)
        for i, j in [(0, 19), (3, 4), (10, 2)]:
            w = clfe.thermal_weight(X, idx, i, j)
            assert 0.0 < w <= 1.0

    def test_too_few_samples(self):
        X = clfe.DataMatrix(np.arange(7.0)[None, :])
        idx = clfe.build_neighbor_index(X, 1)
        with pytest.raises(TooFewSamplesForThermal):
            clfe.thermal_weight(X, idx, 0, 1)

    def test_zero_bandwidth_rejected(self):
        # 8 copies of the same point: every 7th-neighbor distance is zero
        X = clfe.DataMatrix(np.zeros((2, 8)) + np.array([[1.0], [2.0]]))
        idx = clfe.build_neighbor_index(X, 1)
        with pytest.raises(ZeroThermal):
            clfe.thermal_weight(X, idx, 0, 1)


class TestUnsupervisedGraphs:
    def test_everyone_neighbor_leaves_no_negatives(self):
        rng = np.random.default_rng(1)
        X = clfe.DataMatrix(rng.standard_normal((3, 9)))
        g = clfe.build_u_cl(X, 8)
        assert np.all(g.s_neg == 0)
        off_diag = ~np.eye(9, dtype=bool)
        assert np.all(g.s_pos[off_diag] > 0)

    def test_separated_clusters_have_no_cross_positives(self):
        rng = np.random.default_rng(2)
        centers = np.array([0.0, 1000.0, 2000.0])
        cols = [c + rng.standard_normal(10) for c in centers]
        X = clfe.DataMatrix(np.concatenate(cols)[None, :])
        g = clfe.build_u_cl(X, 2)
        cluster = np.repeat([0, 1, 2], 10)
        cross = cluster[:, None] != cluster[None, :]
        # oracle on this instance: verify with brute-force neighbor lists
        for j in range(30):
            for i in brute_force_neighbors(X.values, 2, j):
                assert cluster[i] == cluster[j]
        assert np.all(g.s_pos[cross] == 0)

    def test_partition_on_random_instance(self):
        rng = np.random.default_rng(3)
        X = clfe.DataMatrix(rng.standard_normal((4, 12)))
        g = clfe.build_u_cl(X, 3)
        assert_valid_partition(g)

    def test_too_few_samples(self):
        X = clfe.DataMatrix(np.arange(7.0)[None, :])
        with pytest.raises(TooFewSamplesForThermal):
            clfe.build_u_cl(X, 2)

    def test_weights_match_thermal_weight_op(self):
        rng = np.random.default_rng(4)
        X = clfe.DataMatrix(rng.standard_normal((3, 10)))
        g = clfe.build_u_cl(X, 2)
        idx = clfe.build_neighbor_index(X, 2)
        support = np.argwhere(g.s_pos > 0)
        assert support.size > 0
        for i, j in support:
            assert g.s_pos[i, j] == clfe.thermal_weight(X, idx, int(i), int(j))


class TestClassIndicatorGraphs:
    def test_worked_three_sample_instance(self):
        g = clfe.build_s_cl1(clfe.LabelVector([1, 1, 2]))
        assert g.s_pos.tolist() == [[0, 1, 0], [1, 0, 0], [0, 0, 0]]
        assert g.s_neg.tolist() == [[0, 0, 1], [0, 0, 1], [1, 1, 0]]

    def test_single_class_has_no_negatives(self):
        g = clfe.build_s_cl1(clfe.LabelVector([1, 1, 1, 1]))
        assert np.all(g.s_neg == 0)

    def test_all_distinct_classes(self):
        g = clfe.build_s_cl1(clfe.LabelVector([1, 2, 3, 4]))
        assert np.all(g.s_pos == 0)
        assert np.array_equal(g.s_neg, 1.0 - np.eye(4))


class TestWithinClassGraphs:
    def test_forced_support_pattern(self):
        # two tight same-class pairs per class, far apart; k=1 forces the
        # positive support to exactly the adjacent pairs
        X = clfe.DataMatrix(
            np.array([[0.0, 1.0, 10.0, 11.0, 100.0, 101.0, 110.0, 111.0]])
        )
        labels = clfe.LabelVector([1, 1, 1, 1, 2, 2, 2, 2])
        g = clfe.build_s_cl2(X, labels, 1)
        expected_pos = {(0, 1), (2, 3), (4, 5), (6, 7)}
        support = {tuple(sorted(p)) for p in map(tuple, np.argwhere(g.s_pos > 0))}
        assert support == expected_pos
        # all cross-class pairs are negative
        cross = labels.labels[:, None] != labels.labels[None, :]
        assert np.all(g.s_neg[cross] == 1)

    def test_max_k_matches_class_indicator_support(self):
        rng = np.random.default_rng(9)
        X = clfe.DataMatrix(rng.standard_normal((3, 10)))
        labels = clfe.LabelVector([1] * 5 + [2] * 5)
        g2 = clfe.build_s_cl2(X, labels, 4)  # k = class size - 1
        g1 = clfe.build_s_cl1(labels)
        assert np.array_equal(g2.s_pos > 0, g1.s_pos > 0)

    def test_negative_support_contains_class_indicator_negatives(self):
        rng = np.random.default_rng(10)
        X, labels = random_labeled_instance(rng, 14, 3, classes=3)
        k = int(np.bincount(labels.labels)[1:].min()) - 1
        g2 = clfe.build_s_cl2(X, labels, max(k, 1))
        g1 = clfe.build_s_cl1(labels)
        assert np.all(g2.s_neg[g1.s_neg > 0] == 1)

    def test_label_length_mismatch(self):
        X = clfe.DataMatrix(np.random.default_rng(0).standard_normal((2, 9)))
        with pytest.raises(LengthMismatch):
            clfe.build_s_cl2(X, clfe.LabelVector([1, 2] * 4), 1)


class TestGraphProperties:
    @pytest.mark.parametrize("method", ["u-cl", "s-cl1", "s-cl2"])
    def test_partition_symmetry_zero_diagonal(self, method):
        rng = np.random.default_rng(20)
        for trial in range(10):
            n = int(rng.integers(9, 30))
            X, labels = random_labeled_instance(rng, n, 4, classes=3)
            k = min(3, int(np.bincount(labels.labels)[1:].min()) - 1)
            if k < 1:
                continue
            g = graph_for_method(method, X, labels, k)
            assert_valid_partition(g)

    @pytest.mark.parametrize("method", ["u-cl", "s-cl2"])
    def test_scale_invariance_of_heat_weights(self, method):
        rng = np.random.default_rng(21)
        X, labels = random_labeled_instance(rng, 12, 3, classes=2)
        g1 = graph_for_method(method, X, labels, 2)
        X3 = clfe.DataMatrix(3.0 * X.values)
        g3 = graph_for_method(method, X3, labels, 2)
        assert np.max(np.abs(g1.s_pos - g3.s_pos)) < 1e-12
        assert np.array_equal(g1.s_neg, g3.s_neg)

    def test_construction_is_deterministic(self):
        rng = np.random.default_rng(22)
        values = rng.standard_normal((4, 15))
        a = clfe.build_u_cl(clfe.DataMatrix(values), 3)
        b = clfe.build_u_cl(clfe.DataMatrix(values), 3)
        assert np.array_equal(a.s_pos, b.s_pos)
        assert np.array_equal(a.s_neg, b.s_neg)


class TestGraphPairValidation:
    def test_asymmetric_rejected(self):
        pos = np.zeros((3, 3))
        pos[0, 1] = 0.5
        neg = 1.0 - np.eye(3)
        neg[0, 1] = 0.0
        with pytest.raises(ValueError):
            clfe.ContrastiveGraphPair(pos, neg, "uCL")

    def test_overlapping_supports_rejected(self):
        pos = np.array([[0.0, 1.0], [1.0, 0.0]])
        neg = np.array([[0.0, 1.0], [1.0, 0.0]])
        with pytest.raises(ValueError):
            clfe.ContrastiveGraphPair(pos, neg, "uCL")

    def test_uncovered_pair_rejected(self):
        pos = np.zeros((3, 3))
        pos[0, 1] = pos[1, 0] = 1.0
        neg = np.zeros((3, 3))
        neg[0, 2] = neg[2, 0] = 1.0  # pair (1,2) in neither graph
        with pytest.raises(ValueError):
            clfe.ContrastiveGraphPair(pos, neg, "sCL1")
