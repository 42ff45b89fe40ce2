"""Forecast error metrics."""

from __future__ import annotations

import numpy as np

from .validation import check_same_length


def rmse(pred, actual) -> float:
    """Root mean squared error between two equal-length series."""
    p, a = check_same_length(pred, actual)
    if p.shape[0] == 0:
        raise ValueError("rmse of empty series is undefined")
    return float(np.sqrt(np.mean((p - a) ** 2)))


def naive_forecast(actual, history_last: float) -> np.ndarray:
    """Last-value predictions aligned with ``actual``: step t predicts actual[t-1]."""
    a = np.asarray(actual, dtype=np.float64).reshape(-1)
    return np.concatenate([[history_last], a[:-1]])


def rmsse(pred, actual, history_last: float) -> float:
    """RMSE scaled by the RMSE of the naive last-value forecast.

    The naive forecast for the first test step is the final training
    value, and thereafter the previous actual. Scores below 1 indicate
    skill beyond persistence. Raises on a constant series (naive error
    zero).
    """
    p, a = check_same_length(pred, actual)
    naive = naive_forecast(a, history_last)
    denom = rmse(naive, a)
    if denom == 0.0:
        raise ValueError("constant series: naive forecast is exact, rmsse undefined")
    return rmse(p, a) / denom
