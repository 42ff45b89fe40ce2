"""Coupled logistic-map benchmark system.

Generates ground-truth trajectories for a two-variable chaotic system,
observation-noise scenarios, and true counterfactual shock paths. Because
the generating dynamics are known, these serve as oracles for causality
and impulse-response experiments: the system is simulated once, and any
estimator's claims can be checked against the true continuation.

The system iterates

    x[t] = x[t-1] * (a_x - b_x * x[t-1] - c_x * y[t-1])
    y[t] = y[t-1] * (a_y - b_y * y[t-1] - c_y * x[t-1])

with defaults (3.8, 3.8, 0.02) and (3.5, 3.5, 0.1). The weak bidirectional
coupling produces "mirage correlation": locally correlated-looking windows
whose full-series rank correlation is near zero.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dataset import Dataset
from .validation import check_positive_int, check_same_length

DIVERGENCE_BOUND = 10.0

DEFAULT_X0 = (0.4, 0.2)


@dataclass(frozen=True)
class LogisticParams:
    """Coefficients of the coupled logistic system (growth, self-damping, coupling)."""

    a_x: float = 3.8
    b_x: float = 3.8
    c_x: float = 0.02
    a_y: float = 3.5
    b_y: float = 3.5
    c_y: float = 0.1

    def decoupled(self) -> "LogisticParams":
        """Same system with the cross-coupling terms removed."""
        return replace(self, c_x=0.0, c_y=0.0)


SCENARIO_KINDS = ("default", "nointeraction", "noise1", "noise2")

_SCENARIO_NOISE = {"default": 0.0, "nointeraction": 0.0, "noise1": 0.1, "noise2": 0.01}


@dataclass(frozen=True)
class ScenarioSpec:
    """A named benchmark scenario: coupling on/off plus observation-noise level."""

    kind: str = "default"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ValueError(f"unknown scenario {self.kind!r}; choose from {SCENARIO_KINDS}")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")

    @property
    def noise_sd(self) -> float:
        return _SCENARIO_NOISE[self.kind]

    def params(self) -> LogisticParams:
        base = LogisticParams()
        return base.decoupled() if self.kind == "nointeraction" else base


def _step(params: LogisticParams, x: float, y: float) -> tuple[float, float]:
    return (
        x * (params.a_x - params.b_x * x - params.c_x * y),
        y * (params.a_y - params.b_y * y - params.c_y * x),
    )


def simulate_system1(
    params: LogisticParams = LogisticParams(),
    x0: tuple[float, float] = DEFAULT_X0,
    n: int = 1000,
) -> Dataset:
    """Iterate the noise-free system for n steps.

    Returns a Dataset of length n + 1 whose first row is the initial state.
    Raises ValueError("divergent trajectory") if any value leaves
    [-10, 10], which signals unusable parameters.
    """
    check_positive_int(n, "n")
    x, y = float(x0[0]), float(x0[1])
    out = np.empty((n + 1, 2))
    out[0] = (x, y)
    for t in range(1, n + 1):
        x, y = _step(params, x, y)
        if abs(x) > DIVERGENCE_BOUND or abs(y) > DIVERGENCE_BOUND:
            raise ValueError(f"divergent trajectory at step {t}: ({x:g}, {y:g})")
        out[t] = (x, y)
    return Dataset(("x", "y"), out)


def simulate_scenario(spec: ScenarioSpec, n: int = 1000, x0=DEFAULT_X0) -> Dataset:
    """Simulate a named scenario: trajectory plus its observation noise, if any."""
    clean = simulate_system1(spec.params(), x0=x0, n=n)
    return add_observation_noise(clean, spec.noise_sd, spec.seed)


def add_observation_noise(data: Dataset, sd: float, seed: int) -> Dataset:
    """Add i.i.d. normal(0, sd) measurement noise to every value.

    The noise is layered onto the finished trajectory; it never feeds back
    into the recursion. sd = 0 returns the input unchanged.
    """
    if sd < 0:
        raise ValueError(f"noise sd must be nonnegative, got {sd}")
    if sd == 0:
        return data
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, sd, size=data.values.shape)
    return data.with_values(data.values + noise)


def true_impulse_path(
    params: LogisticParams,
    history: Dataset,
    shock_var: str,
    epsilon: float,
    horizon: int,
) -> Dataset:
    """Continue the TRUE system after shocking the final observed state.

    The last row of ``history`` is perturbed by ``epsilon`` on
    ``shock_var`` and the generating equations are iterated ``horizon``
    steps from that state. Call again with epsilon = 0 to get the
    unshocked continuation; the difference of the two paths is the true
    impulse response.
    """
    check_positive_int(horizon, "horizon")
    if history.n_obs < 1:
        raise ValueError("history must be nonempty")
    if tuple(history.names) != ("x", "y"):
        raise ValueError(f"system has variables ('x', 'y'), got {history.names}")
    j = history.index_of(shock_var)
    state = history.values[-1].copy()
    state[j] += epsilon
    x, y = state
    out = np.empty((horizon, 2))
    for t in range(horizon):
        x, y = _step(params, x, y)
        if abs(x) > DIVERGENCE_BOUND or abs(y) > DIVERGENCE_BOUND:
            raise ValueError(f"divergent trajectory at step {t + 1}: ({x:g}, {y:g})")
        out[t] = (x, y)
    return Dataset(history.names, out)


def spearman(a, b) -> float:
    """Spearman rank correlation with average ranks for ties."""
    a, b = check_same_length(a, b)
    if a.shape[0] < 2:
        raise ValueError("need at least 2 observations")
    ra, rb = _average_ranks(a), _average_ranks(b)
    ra = ra - ra.mean()
    rb = rb - rb.mean()
    denom = np.sqrt((ra * ra).sum() * (rb * rb).sum())
    if denom == 0:
        raise ValueError("rank correlation undefined for a constant series")
    return float((ra * rb).sum() / denom)


def _average_ranks(v: np.ndarray) -> np.ndarray:
    order = np.argsort(v, kind="stable")
    ranks = np.empty(len(v))
    sv = v[order]
    i = 0
    while i < len(v):
        j = i
        while j + 1 < len(v) and sv[j + 1] == sv[i]:
            j += 1
        # ranks are 1-based; tied values share the average of their positions
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks
