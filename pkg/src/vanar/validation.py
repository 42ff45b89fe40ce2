"""Input validation helpers shared by the estimators."""

from __future__ import annotations

import numpy as np


def check_matrix(values, name: str = "values") -> np.ndarray:
    """Coerce to a 2-D float64 array with no NaN/inf entries."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got ndim={arr.ndim}")
    if arr.shape[0] < 1:
        raise ValueError(f"{name} must have at least one row")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains NaN or infinite entries")
    return arr


def check_vector(values, name: str = "values") -> np.ndarray:
    """Coerce to a 1-D float64 array with no NaN/inf entries."""
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains NaN or infinite entries")
    return arr


def check_positive_int(value, name: str) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return int(value)


def check_fitted(estimator, attribute: str) -> None:
    """Raise if ``estimator`` has not been fitted (missing trailing-underscore attribute)."""
    if getattr(estimator, attribute, None) is None:
        raise RuntimeError(
            f"{type(estimator).__name__} must be fit before calling this method"
        )


def check_same_length(a, b, names: str = "series") -> tuple[np.ndarray, np.ndarray]:
    a = check_vector(a, "first " + names)
    b = check_vector(b, "second " + names)
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"{names} must have equal length, got {a.shape[0]} and {b.shape[0]}")
    return a, b
