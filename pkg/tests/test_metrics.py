import numpy as np
import pytest

from vanar.metrics import naive_forecast, rmse, rmsse


class TestRmse:
    def test_perfect(self):
        assert rmse([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0

    def test_arithmetic(self):
        # errors [3, -4] -> sqrt((9 + 16) / 2)
        assert rmse([4.0, 0.0], [1.0, 4.0]) == pytest.approx(np.sqrt(12.5))

    def test_constant_bias(self):
        actual = np.linspace(0, 1, 17)
        assert rmse(actual + 0.25, actual) == pytest.approx(0.25)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            rmse([1.0], [1.0, 2.0])

    def test_empty(self):
        with pytest.raises(ValueError):
            rmse([], [])


class TestRmsse:
    def test_naive_alignment(self):
        # naive prediction for step t is the previous actual, seeded by the last train value
        got = naive_forecast([5.0, 6.0, 7.0], history_last=4.0)
        assert got.tolist() == [4.0, 5.0, 6.0]

    def test_naive_forecast_scores_one(self):
        actual = [5.0, 6.0, 4.0, 7.0]
        naive = naive_forecast(actual, history_last=3.0)
        assert rmsse(naive, actual, history_last=3.0) == pytest.approx(1.0)

    def test_perfect_forecast_scores_zero(self):
        actual = [5.0, 6.0, 4.0]
        assert rmsse(actual, actual, history_last=3.0) == 0.0

    def test_constant_series_rejected(self):
        with pytest.raises(ValueError, match="constant series"):
            rmsse([1.0, 1.0], [2.0, 2.0], history_last=2.0)
