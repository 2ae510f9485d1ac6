import numpy as np
import pytest
from oracles import brute_force_two_means

from ficlust import (
    CentersModel,
    ConfigError,
    FitOptions,
    InsufficientDataError,
    empirical_risk,
    init_centers,
    lloyd_fit,
    predict,
)


class TestFitOptions:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"k": 0},
            {"k": 2, "max_iters": 0},
            {"k": 2, "rel_tol": -1.0},
            {"k": 2, "restarts": 0},
            {"k": 2, "init_strategy": "magic"},
        ],
    )
    def test_rejects_bad_options(self, kwargs):
        with pytest.raises(ConfigError):
            FitOptions(**kwargs)


class TestInitCenters:
    def test_identical_rows_insufficient(self):
        D = np.ones((5, 2))
        with pytest.raises(InsufficientDataError):
            init_centers(D, FitOptions(k=2, seed=0))

    def test_fewer_rows_than_k(self):
        with pytest.raises(InsufficientDataError):
            init_centers([[0.0], [1.0]], FitOptions(k=3, seed=0))

    def test_spread_two_points(self):
        model = init_centers([0.0, 10.0], FitOptions(k=2, seed=5))
        assert sorted(model.centers.ravel()) == [0.0, 10.0]

    def test_seed_determinism(self):
        rng = np.random.default_rng(3)
        D = rng.normal(size=(20, 3))
        for strategy in ("greedy-spread", "uniform-random"):
            opts = FitOptions(k=4, seed=11, init_strategy=strategy)
            a = init_centers(D, opts).centers
            b = init_centers(D, opts).centers
            assert np.array_equal(a, b)

    def test_uniform_random_distinct(self):
        D = np.array([[0.0], [0.0], [1.0], [1.0], [2.0]])
        model = init_centers(D, FitOptions(k=3, seed=1, init_strategy="uniform-random"))
        assert len({float(v) for v in model.centers.ravel()}) == 3


class TestLloydFit:
    def test_two_cluster_oracle_instance(self):
        report = lloyd_fit([0, 1, 10, 11], FitOptions(k=2, seed=0))
        assert sorted(report.model.centers.ravel()) == [0.5, 10.5]
        assert report.risk == pytest.approx(0.25, abs=1e-12)

    def test_k1_is_mean(self):
        rng = np.random.default_rng(4)
        D = rng.normal(size=(15, 2))
        report = lloyd_fit(D, FitOptions(k=1, seed=0))
        assert np.allclose(report.model.centers[0], D.mean(axis=0), atol=1e-12)
        assert report.risk == pytest.approx(((D - D.mean(axis=0)) ** 2).sum(axis=1).mean())

    def test_k_equals_n_zero_risk(self):
        rng = np.random.default_rng(5)
        D = rng.normal(size=(6, 2))
        report = lloyd_fit(D, FitOptions(k=6, seed=0, restarts=3))
        assert report.risk == pytest.approx(0.0, abs=1e-12)

    def test_risk_trace_nonincreasing(self):
        rng = np.random.default_rng(6)
        for trial in range(20):
            D = rng.uniform(0, 10, size=(rng.integers(8, 40), rng.integers(1, 4)))
            report = lloyd_fit(D, FitOptions(k=3, seed=trial, restarts=2))
            assert np.all(np.diff(report.risk_trace) <= 1e-12)

    def test_seed_determinism_bitwise(self):
        rng = np.random.default_rng(7)
        D = rng.normal(size=(30, 2))
        opts = FitOptions(k=3, seed=42)
        a = lloyd_fit(D, opts)
        b = lloyd_fit(D, opts)
        assert np.array_equal(a.model.centers, b.model.centers)
        assert np.array_equal(a.assignment, b.assignment)
        assert a.risk == b.risk
        assert a.iterations == b.iterations

    def test_row_permutation_leaves_risk(self):
        # enough restarts that both row orders reach the same optimum
        rng = np.random.default_rng(8)
        D = np.vstack(
            [rng.normal(0, 0.4, size=(10, 2)), rng.normal(8, 0.4, size=(10, 2))]
        )
        perm = rng.permutation(len(D))
        a = lloyd_fit(D, FitOptions(k=2, seed=0, restarts=20))
        b = lloyd_fit(D[perm], FitOptions(k=2, seed=0, restarts=20))
        assert a.risk == pytest.approx(b.risk, abs=1e-9)

    def test_matches_exhaustive_optimum_mostly(self):
        rng = np.random.default_rng(9)
        hits = 0
        for trial in range(20):
            n = int(rng.integers(3, 9))
            d = int(rng.integers(1, 3))
            D = rng.uniform(0, 10, size=(n, d))
            report = lloyd_fit(D, FitOptions(k=2, seed=trial, restarts=20))
            if report.risk <= brute_force_two_means(D) + 1e-9:
                hits += 1
        assert hits >= 19

    def test_insufficient_rows(self):
        with pytest.raises(InsufficientDataError):
            lloyd_fit([[0.0]], FitOptions(k=2, seed=0))

    def test_explicit_init_single_path(self):
        D = np.array([[0.0], [1.0], [10.0], [11.0]])
        report = lloyd_fit(D, FitOptions(k=2, seed=0), init=[[0.0], [11.0]])
        assert sorted(report.model.centers.ravel()) == [0.5, 10.5]

    def test_empty_cluster_repair_keeps_k(self):
        # center 50 starts memberless and must be reseeded, not dropped
        D = np.array([[0.0], [0.1], [100.0], [100.1]])
        report = lloyd_fit(D, FitOptions(k=3, seed=0), init=[[0.05], [50.0], [100.05]])
        assert report.model.k == 3
        assert np.isfinite(report.risk)
        assert np.all(np.diff(report.risk_trace) <= 1e-12)

    def test_report_risk_matches_model(self):
        rng = np.random.default_rng(10)
        D = rng.normal(size=(25, 3))
        report = lloyd_fit(D, FitOptions(k=4, seed=1))
        assert report.risk == empirical_risk(D, report.model)
        assert report.iterations <= 300
        assert len(report.assignment) == 25


class TestPredict:
    def test_fixed_point_of_training(self):
        rng = np.random.default_rng(11)
        D = rng.normal(size=(40, 2))
        report = lloyd_fit(D, FitOptions(k=3, seed=2))
        assert np.array_equal(predict(D, report.model), report.assignment)

    def test_row_on_center(self):
        model = CentersModel([[0.0], [5.0], [9.0]])
        assert predict([[9.0]], model)[0] == 2

    def test_hand_labels(self):
        model = CentersModel([[0.0], [5.0]])
        assert predict([-1, 4, 6], model).tolist() == [0, 1, 1]

    def test_dim_mismatch(self):
        with pytest.raises(Exception):
            predict([[0.0, 1.0]], CentersModel([[0.0]]))
