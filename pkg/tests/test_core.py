import numpy as np
import pytest

from ficlust import (
    CentersModel,
    ConfigError,
    DimensionError,
    EmptyInputError,
    NonFiniteValueError,
    as_matrix,
    empirical_risk,
    max_row_norm,
    nearest_center,
    squared_distance,
)


class TestAsMatrix:
    def test_row_major_shape(self):
        m = as_matrix([[1, 2, 3], [4, 5, 6]])
        assert m.shape == (2, 3)
        assert m.flags["C_CONTIGUOUS"]

    def test_flat_input_is_column(self):
        assert as_matrix([0, 1, 5]).shape == (3, 1)

    def test_rejects_non_finite(self):
        with pytest.raises(NonFiniteValueError):
            as_matrix([[1.0, np.nan]])
        with pytest.raises(NonFiniteValueError):
            as_matrix([[np.inf], [0.0]])

    def test_rejects_empty(self):
        with pytest.raises(EmptyInputError):
            as_matrix(np.empty((0, 2)))


class TestCentersModel:
    def test_block_split_validation(self):
        m = CentersModel(np.zeros((2, 5)), block_split=(3, 2))
        assert m.block_split == (3, 2)
        with pytest.raises(ConfigError):
            CentersModel(np.zeros((2, 5)), block_split=(4, 2))
        with pytest.raises(ConfigError):
            CentersModel(np.zeros((2, 5)), block_split=(0, 5))

    def test_rejects_non_finite_centers(self):
        with pytest.raises(NonFiniteValueError):
            CentersModel([[np.nan]])

    def test_centers_are_read_only(self):
        m = CentersModel([[1.0, 2.0]])
        with pytest.raises(ValueError):
            m.centers[0, 0] = 3.0


class TestSquaredDistance:
    def test_identity(self):
        assert squared_distance([1, 2], [1, 2]) == 0.0

    def test_pythagorean(self):
        assert squared_distance([0, 0], [3, 4]) == 25.0

    def test_hand_value(self):
        assert squared_distance([1, -1], [-2, 3]) == 25.0

    def test_symmetry_and_identity_property(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            x = rng.normal(size=4)
            u = rng.normal(size=4)
            assert squared_distance(x, u) == pytest.approx(squared_distance(u, x), abs=0)
            assert squared_distance(x, x) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            squared_distance([1, 2], [1, 2, 3])


class TestNearestCenter:
    def test_basic(self):
        assert nearest_center([0], CentersModel([[0.0], [5.0]])) == (0, 0.0)

    def test_exact_tie_lowest_index(self):
        idx, dist = nearest_center([2.5], CentersModel([[0.0], [5.0]]))
        assert idx == 0
        assert dist == 6.25

    def test_hand_value(self):
        idx, dist = nearest_center([1, 1], CentersModel([[0, 0], [3, 3]]))
        assert (idx, dist) == (0, 2.0)

    def test_tie_breaking_any_order(self):
        # equidistant centers fed in any order: lowest index wins
        centers = np.array([[1.0], [-1.0], [1.0]])
        idx, _ = nearest_center([0.0], CentersModel(centers))
        assert idx == 0

    def test_dim_mismatch(self):
        with pytest.raises(DimensionError):
            nearest_center([1, 2], CentersModel([[0.0]]))


class TestEmpiricalRisk:
    def test_zero_on_own_center(self):
        x = [[1.0, 2.0]]
        assert empirical_risk(x, CentersModel(x)) == 0.0

    def test_symmetric_pair(self):
        assert empirical_risk([0, 2], CentersModel([[1.0]])) == 1.0

    def test_hand_sum(self):
        risk = empirical_risk([0, 1, 5], CentersModel([[0.5], [5.0]]))
        assert risk == pytest.approx(1 / 6, rel=1e-12)

    def test_each_point_its_own_center(self):
        rng = np.random.default_rng(1)
        pts = rng.normal(size=(6, 3))
        assert empirical_risk(pts, CentersModel(pts)) == 0.0

    def test_adding_center_never_increases(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            pts = rng.uniform(0, 10, size=(rng.integers(2, 10), 2))
            base = rng.uniform(0, 10, size=(3, 2))
            extra = np.vstack([base, rng.uniform(0, 10, size=(1, 2))])
            assert empirical_risk(pts, CentersModel(extra)) <= empirical_risk(
                pts, CentersModel(base)
            ) + 1e-12

    def test_errors(self):
        with pytest.raises(EmptyInputError):
            empirical_risk(np.empty((0, 1)), CentersModel([[0.0]]))
        with pytest.raises(DimensionError):
            empirical_risk([[0.0, 1.0]], CentersModel([[0.0]]))


class TestMaxRowNorm:
    def test_zero(self):
        assert max_row_norm([[0, 0]]) == 0.0

    def test_pythagorean(self):
        assert max_row_norm([[3, 4], [1, 0]]) == 5.0

    def test_hand_value(self):
        assert max_row_norm([[1, 1], [-2, 2]]) == pytest.approx(np.sqrt(8), rel=1e-12)

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            max_row_norm(np.empty((0, 2)))
