"""Fit statistics."""

import math

import numpy as np
import pytest

from errors import LengthMismatch, TooFewPoints, ValidationError
from fit_metrics import CONSTANT_OBSERVED, CONSTANT_PREDICTED, compute_metrics, mean_squared_error


class TestComputeMetrics:
    def test_perfect_fit(self) -> None:
        m = compute_metrics([1, 2, 3], [1, 2, 3])
        assert (m.r2, m.r, m.mse, m.mae, m.n) == (1.0, 1.0, 0.0, 0.0, 3)

    def test_mean_predictor(self) -> None:
        m = compute_metrics([1, 2, 3], [2, 2, 2])
        assert m.r2 == pytest.approx(0.0)
        assert m.mse == pytest.approx(2 / 3)
        assert m.mae == pytest.approx(2 / 3)
        assert m.r is None
        assert m.degenerate == (CONSTANT_PREDICTED,)

    def test_hand_example(self) -> None:
        m = compute_metrics([1, 2, 3], [1, 2, 4])
        assert m.mse == pytest.approx(1 / 3)
        assert m.mae == pytest.approx(1 / 3)
        assert m.r2 == pytest.approx(0.5)
        assert m.r == pytest.approx(3 / (math.sqrt(2) * math.sqrt(42 / 9)), abs=1e-12)
        assert m.r == pytest.approx(0.9820, abs=1e-4)

    def test_r2_can_be_negative(self) -> None:
        assert compute_metrics([1, 2, 3], [3, 2, 1]).r2 == pytest.approx(-3.0)

    def test_constant_observed(self) -> None:
        exact = compute_metrics([4, 4, 4], [4, 4, 4])
        assert exact.r2 == 1.0 and exact.r is None
        off = compute_metrics([4, 4, 4], [1, 2, 3])
        assert off.r2 == 0.0 and off.r is None
        assert off.degenerate == (CONSTANT_OBSERVED,)

    def test_errors(self) -> None:
        with pytest.raises(LengthMismatch):
            compute_metrics([1, 2, 3], [1, 2])
        with pytest.raises(TooFewPoints):
            compute_metrics([1], [1])
        with pytest.raises(ValidationError):
            compute_metrics([1, 2, np.nan], [1, 2, 3])

    def test_mse_divides_by_n(self) -> None:
        assert mean_squared_error([0, 0, 0, 0], [1, 1, 1, 1]) == 1.0


class TestMetricProperties:
    @pytest.fixture
    def pairs(self):
        rng = np.random.default_rng(17)
        return [(rng.normal(size=20), rng.normal(size=20)) for _ in range(50)]

    def test_bounds_and_jensen(self, pairs) -> None:
        for y, yhat in pairs:
            m = compute_metrics(y, yhat)
            assert m.mse >= 0 and m.mae >= 0
            assert m.mae ** 2 <= m.mse + 1e-12
            assert abs(m.r) <= 1.0 + 1e-12
            assert m.r2 <= 1.0 + 1e-12

    def test_shift_invariance_of_r(self, pairs) -> None:
        for y, yhat in pairs:
            assert compute_metrics(y, yhat + 5.0).r == pytest.approx(compute_metrics(y, yhat).r, abs=1e-12)

    def test_permutation_equivariance(self, pairs) -> None:
        rng = np.random.default_rng(4)
        for y, yhat in pairs:
            order = rng.permutation(y.size)
            a = compute_metrics(y, yhat)
            b = compute_metrics(y[order], yhat[order])
            assert b.mse == pytest.approx(a.mse, rel=1e-12)
            assert b.mae == pytest.approx(a.mae, rel=1e-12)
            assert b.r2 == pytest.approx(a.r2, rel=1e-12, abs=1e-12)
            assert b.r == pytest.approx(a.r, rel=1e-12, abs=1e-12)

    def test_affine_predictions_correlate_perfectly(self) -> None:
        yhat = np.linspace(-3.0, 8.0, 27)
        assert compute_metrics(2.5 + 0.7 * yhat, yhat).r == pytest.approx(1.0, abs=1e-12)

    def test_zero_error_agreement(self) -> None:
        y = np.linspace(1.0, 2.0, 10)
        m = compute_metrics(y, y.copy())
        assert m.r2 == 1.0 and m.mse == 0.0 and m.mae == 0.0
