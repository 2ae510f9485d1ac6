import numpy as np
import pytest

from ficlust import (
    CentersModel,
    ConfigError,
    DimensionError,
    FitOptions,
    WeightVector,
    adaptation_risk,
    discrepancy_candidates,
    empirical_risk,
    estimate_discrepancy,
    lloyd_fit,
    weighted_risk,
)


class TestWeightVector:
    def test_normalizes_to_one(self):
        w = WeightVector([1.0, 3.0])
        assert w.weights.tolist() == [0.25, 0.75]

    def test_rejects_negative_and_zero_sum(self):
        with pytest.raises(ConfigError):
            WeightVector([1.0, -0.5])
        with pytest.raises(ConfigError):
            WeightVector([0.0, 0.0])


class TestWeightedRisk:
    def test_uniform_equals_empirical_exactly(self):
        rng = np.random.default_rng(30)
        for _ in range(20):
            D = rng.normal(size=(rng.integers(1, 20), 3))
            model = CentersModel(rng.normal(size=(4, 3)))
            w = WeightVector.uniform(D.shape[0])
            assert weighted_risk(D, w, model) == empirical_risk(D, model)

    def test_point_mass_on_center(self):
        model = CentersModel([[2.0]])
        w = WeightVector([1.0, 0.0])
        assert weighted_risk([[2.0], [7.0]], w, model) == 0.0

    def test_hand_value(self):
        w = WeightVector([0.25, 0.75])
        assert weighted_risk([0.0, 4.0], w, CentersModel([[0.0]])) == 12.0

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            weighted_risk([[0.0]], WeightVector([1.0, 1.0]), CentersModel([[0.0]]))


class TestEstimateDiscrepancy:
    def test_identical_data_is_exactly_zero(self):
        rng = np.random.default_rng(31)
        D = rng.normal(size=(12, 2))
        candidates = [CentersModel(rng.normal(size=(3, 2))) for _ in range(5)]
        est = estimate_discrepancy(D, WeightVector.uniform(12), D, candidates)
        assert est.value == 0.0
        assert est.candidate_count == 5
        assert est.attaining_candidate == 0  # all gaps zero; lowest index wins

    def test_singleton_candidate_is_gap(self):
        Dp = [[0.0]]
        Dc = [[10.0]]
        u = CentersModel([[0.0]])
        est = estimate_discrepancy(Dp, WeightVector.uniform(1), Dc, [u])
        assert est.value == 100.0
        assert est.attaining_candidate == 0

    def test_monotone_in_candidate_set(self):
        rng = np.random.default_rng(32)
        for _ in range(20):
            Dp = rng.normal(size=(8, 2))
            Dc = rng.normal(loc=1.5, size=(6, 2))
            w = WeightVector.uniform(8)
            cands = [CentersModel(rng.normal(size=(2, 2))) for _ in range(6)]
            prev = 0.0
            for upto in range(1, len(cands) + 1):
                est = estimate_discrepancy(Dp, w, Dc, cands[:upto])
                assert est.value >= prev - 1e-15
                prev = est.value

    def test_swap_symmetry_with_uniform_weights(self):
        rng = np.random.default_rng(33)
        Dp = rng.normal(size=(7, 2))
        Dc = rng.normal(loc=2.0, size=(9, 2))
        cands = [CentersModel(rng.normal(size=(3, 2))) for _ in range(4)]
        a = estimate_discrepancy(Dp, WeightVector.uniform(7), Dc, cands)
        b = estimate_discrepancy(Dc, WeightVector.uniform(9), Dp, cands)
        assert a.value == pytest.approx(b.value, abs=1e-12)

    def test_empty_candidates(self):
        with pytest.raises(ConfigError):
            estimate_discrepancy([[0.0]], WeightVector.uniform(1), [[0.0]], [])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            estimate_discrepancy(
                [[0.0]], WeightVector.uniform(1), [[0.0, 1.0]], [CentersModel([[0.0]])]
            )


class TestAdaptationRisk:
    def test_zero_when_rows_sit_on_prior(self):
        u0 = CentersModel([[1.0, 2.0], [5.0, 5.0]])
        rows = [[1.0, 2.0], [5.0, 5.0], [1.0, 2.0]]
        assert adaptation_risk(rows, u0) == 0.0

    def test_single_row_definition(self):
        u0 = CentersModel([[1.0]])
        assert adaptation_risk([[4.0]], u0) == 9.0

    def test_hand_value(self):
        u0 = CentersModel([[1.0], [100.0]])
        assert adaptation_risk([0.0, 2.0], u0) == 1.0

    def test_decreases_onto_true_means(self):
        rng = np.random.default_rng(34)
        pts = np.vstack(
            [rng.normal(0, 0.2, size=(20, 2)), rng.normal(9, 0.2, size=(20, 2))]
        )
        true_means = np.vstack([pts[:20].mean(axis=0), pts[20:].mean(axis=0)])
        offsets = [4.0, 1.0, 0.0]
        risks = [
            adaptation_risk(pts, CentersModel(true_means + off)) for off in offsets
        ]
        assert risks[0] > risks[1] > risks[2]
        assert risks[2] == pytest.approx(
            empirical_risk(pts, CentersModel(true_means)), abs=0
        )


class TestDiscrepancyCandidates:
    def test_count_and_dims(self):
        rng = np.random.default_rng(35)
        a = rng.normal(size=(20, 2))
        b = rng.normal(size=(15, 2))
        fitted = [lloyd_fit(a, FitOptions(k=2, seed=0)).model]
        cands = discrepancy_candidates([a, b], k=2, seed=9, per_matrix=4, fitted=fitted)
        assert len(cands) == 1 + 8
        assert all(c.dim == 2 for c in cands)

    def test_deterministic(self):
        rng = np.random.default_rng(36)
        a = rng.normal(size=(20, 2))
        c1 = discrepancy_candidates([a], k=2, seed=5, per_matrix=3)
        c2 = discrepancy_candidates([a], k=2, seed=5, per_matrix=3)
        for u, v in zip(c1, c2):
            assert np.array_equal(u.centers, v.centers)
