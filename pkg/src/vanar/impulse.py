"""Model-driven impulse paths and impulse responses.

A shock of size epsilon is added to one variable in the final observed
row; the fitted model then recursively predicts forward from the shocked
history. The impulse response is the elementwise difference between this
shocked path and the model's ordinary (unshocked) recursive forecast.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dataset import Dataset
from .simulate import true_impulse_path
from .validation import check_positive_int


@dataclass(frozen=True)
class ImpulseSet:
    """A shocked history together with the model's recursive continuation.

    ``base`` is untouched except the single shocked entry (last row,
    ``shock_var`` column); ``path`` holds the ``horizon`` predicted rows
    after the shock time.
    """

    base: Dataset
    shock_var: str
    epsilon: float
    shock_time: int
    horizon: int
    path: Dataset


def shocked_history(base: Dataset, shock_var: str, epsilon: float) -> Dataset:
    """Copy of ``base`` with epsilon added to the final value of ``shock_var``."""
    j = base.index_of(shock_var)
    values = base.values.copy()
    values[-1, j] += epsilon
    return base.with_values(values)


def impulse_path(model, base: Dataset, shock_var: str, epsilon: float,
                 horizon: int) -> ImpulseSet:
    """Recursive prediction from the shocked history.

    With epsilon = 0 this is exactly the model's ordinary recursive
    forecast from ``base``.
    """
    check_positive_int(horizon, "horizon")
    shocked = shocked_history(base, shock_var, epsilon)
    path = model.forecast(shocked, horizon)
    return ImpulseSet(
        base=shocked,
        shock_var=shock_var,
        epsilon=epsilon,
        shock_time=base.n_obs,
        horizon=horizon,
        path=path,
    )


def impulse_response(model, base: Dataset, shock_var: str, epsilon: float,
                     horizon: int) -> Dataset:
    """Shocked-minus-unshocked predicted paths, per variable and step."""
    shocked = impulse_path(model, base, shock_var, epsilon, horizon)
    unshocked = impulse_path(model, base, shock_var, 0.0, horizon)
    diff = shocked.path.values - unshocked.path.values
    return Dataset(base.names, diff)


def true_impulse_response(params, base: Dataset, shock_var: str, epsilon: float,
                          horizon: int) -> Dataset:
    """Ground-truth response when the generating system is known."""
    shocked = true_impulse_path(params, base, shock_var, epsilon, horizon)
    unshocked = true_impulse_path(params, base, shock_var, 0.0, horizon)
    return Dataset(base.names, shocked.values - unshocked.values)
