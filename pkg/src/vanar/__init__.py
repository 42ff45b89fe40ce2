"""Linear and neural vector autoregression toolkit.

Fit classic VAR/AR models or their neural counterparts on multivariate
time series; forecast recursively, score nonlinear Granger causality from
out-of-sample error, and simulate impulse responses to shocks. A built-in
coupled chaotic system provides ground-truth trajectories, causality, and
counterfactual shock paths for benchmarking.
"""

from .causality import CausalityEdge, CausalityGraph, causality_graph, causality_score, rolling_one_step
from .dataset import Dataset, concat_datasets, read_csv, split_dataset, write_csv
from .impulse import ImpulseSet, impulse_path, impulse_response, true_impulse_response
from .metrics import rmse, rmsse
from .network import AdaGradState, Mlp, TrainConfig, train
from .preprocessing import LagDesign, StandardScaler, build_lag_design
from .simulate import (
    LogisticParams,
    ScenarioSpec,
    add_observation_noise,
    simulate_scenario,
    simulate_system1,
    spearman,
    true_impulse_path,
)
from .vanar import Autoencoder, VanarForecaster, encode_features, fit_autoencoder, fit_vanar
from .var import NaiveForecaster, VarForecaster, compute_aic, fit_var_ols, select_lag_aic

__version__ = "0.1.0"

__all__ = [
    "AdaGradState",
    "Autoencoder",
    "CausalityEdge",
    "CausalityGraph",
    "Dataset",
    "ImpulseSet",
    "LagDesign",
    "LogisticParams",
    "Mlp",
    "NaiveForecaster",
    "ScenarioSpec",
    "StandardScaler",
    "TrainConfig",
    "VanarForecaster",
    "VarForecaster",
    "add_observation_noise",
    "build_lag_design",
    "causality_graph",
    "causality_score",
    "compute_aic",
    "concat_datasets",
    "encode_features",
    "fit_autoencoder",
    "fit_var_ols",
    "fit_vanar",
    "impulse_path",
    "impulse_response",
    "read_csv",
    "rmse",
    "rmsse",
    "rolling_one_step",
    "select_lag_aic",
    "simulate_scenario",
    "simulate_system1",
    "spearman",
    "split_dataset",
    "train",
    "true_impulse_path",
    "true_impulse_response",
    "write_csv",
]
