import numpy as np
import pytest
from oracles import brute_force_accuracy, brute_force_fscore, brute_force_matching_cost

from ficlust import (
    DimensionError,
    EmptyInputError,
    InsufficientDataError,
    accuracy,
    nmi,
    optimal_matching,
    pairwise_fscore,
)


class TestOptimalMatching:
    def test_identity_favoring(self):
        mapping, cost = optimal_matching([[0, 1], [1, 0]])
        assert mapping.tolist() == [0, 1] and cost == 0.0

    def test_antidiagonal_favoring(self):
        mapping, cost = optimal_matching([[1, 0], [0, 1]])
        assert mapping.tolist() == [1, 0] and cost == 0.0

    def test_three_by_three(self):
        mapping, cost = optimal_matching([[4, 1, 3], [2, 0, 5], [3, 2, 2]])
        assert mapping.tolist() == [1, 0, 2] and cost == 5.0

    def test_rectangular_padding(self):
        mapping, cost = optimal_matching([[5.0, 1.0, 9.0]])
        assert mapping.tolist() == [1] and cost == 1.0
        mapping, cost = optimal_matching([[5.0], [1.0], [9.0]])
        assert sorted(mapping.tolist()) == [-1, -1, 0]
        assert cost == 1.0

    def test_matches_brute_force(self):
        rng = np.random.default_rng(20)
        for _ in range(60):
            r = int(rng.integers(1, 7))
            c = int(rng.integers(1, 7))
            cost = rng.uniform(-5, 5, size=(r, c))
            _, got = optimal_matching(cost)
            assert got == pytest.approx(brute_force_matching_cost(cost), abs=1e-9)

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            optimal_matching(np.empty((0, 0)))


class TestAccuracy:
    def test_perfect(self):
        assert accuracy([0, 1, 2, 1], [0, 1, 2, 1]) == 1.0

    def test_relabeling_invariance(self):
        truth = [0, 1, 1, 2, 2, 2]
        relabeled = [5, 9, 9, 1, 1, 1]
        assert accuracy(relabeled, truth) == 1.0

    def test_hand_value(self):
        assert accuracy([0, 0, 1, 1], [0, 1, 1, 1]) == 0.75

    def test_matches_brute_force(self):
        rng = np.random.default_rng(21)
        for _ in range(60):
            n = int(rng.integers(2, 13))
            pred = rng.integers(0, rng.integers(1, 6), size=n)
            truth = rng.integers(0, rng.integers(1, 6), size=n)
            assert accuracy(pred, truth) == pytest.approx(
                brute_force_accuracy(pred, truth), abs=1e-12
            )

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            accuracy([0, 1], [0, 1, 2])


class TestPairwiseFscore:
    def test_perfect(self):
        assert pairwise_fscore([0, 0, 1], [5, 5, 9]) == 1.0

    def test_all_singletons(self):
        assert pairwise_fscore([0, 1, 2, 3], [0, 0, 1, 1]) == 0.0

    def test_hand_value(self):
        assert pairwise_fscore([0, 0, 1, 1], [0, 1, 1, 1]) == pytest.approx(0.4)

    def test_matches_pair_oracle(self):
        rng = np.random.default_rng(22)
        for _ in range(60):
            n = int(rng.integers(2, 13))
            pred = rng.integers(0, 4, size=n)
            truth = rng.integers(0, 4, size=n)
            assert pairwise_fscore(pred, truth) == pytest.approx(
                brute_force_fscore(pred, truth), abs=1e-12
            )

    def test_too_few_rows(self):
        with pytest.raises(InsufficientDataError):
            pairwise_fscore([0], [0])


class TestNmi:
    def test_identical_partitions(self):
        assert nmi([0, 0, 1, 1], [1, 1, 0, 0]) == 1.0

    def test_single_cluster_vs_balanced(self):
        assert nmi([0, 0, 0, 0], [0, 0, 1, 1]) == 0.0

    def test_independent_partitions(self):
        assert nmi([0, 0, 1, 1], [0, 1, 0, 1]) == pytest.approx(0.0, abs=1e-12)

    def test_both_trivial(self):
        assert nmi([3, 3, 3], [7, 7, 7]) == 1.0

    def test_symmetry(self):
        rng = np.random.default_rng(23)
        for _ in range(30):
            a = rng.integers(0, 4, size=20)
            b = rng.integers(0, 4, size=20)
            assert nmi(a, b) == pytest.approx(nmi(b, a), abs=1e-12)

    def test_relabeling_invariance(self):
        a = np.array([0, 0, 1, 1, 2, 2])
        b = np.array([1, 1, 0, 2, 2, 0])
        assert nmi(a, b) == pytest.approx(nmi(a + 10, b), abs=1e-12)
        assert nmi(a, b) == pytest.approx(nmi(a, (b * 7) + 3), abs=1e-12)


def test_all_metrics_bounded_on_fuzz():
    rng = np.random.default_rng(24)
    for _ in range(300):
        n = int(rng.integers(2, 30))
        pred = rng.integers(0, rng.integers(1, 8), size=n)
        truth = rng.integers(0, rng.integers(1, 8), size=n)
        for value in (accuracy(pred, truth), pairwise_fscore(pred, truth), nmi(pred, truth)):
            assert 0.0 <= value <= 1.0
