"""Config-driven experiment runner.

A single JSON config describes the data source (simulated scenario or
CSV), the train/test environment, the model roster, and the tasks to run
(forecast, granger, irf, one-step). ``run`` validates the whole config up
front, executes each task, and writes a manifest plus per-task CSV
reports into the output directory. Everything is seeded explicitly, so
replaying a manifest's echoed config reproduces the outputs byte for
byte.
"""

from __future__ import annotations

import csv
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .causality import causality_graph, rolling_one_step
from .dataset import Dataset, read_csv, split_dataset
from .impulse import impulse_path
from .metrics import rmse, rmsse
from .simulate import DEFAULT_X0, ScenarioSpec, simulate_scenario, true_impulse_path
from .validation import check_positive_int
from .var import NaiveForecaster, VarForecaster, select_lag_aic
from .vanar import VanarForecaster

MODEL_KINDS = ("var", "ar", "vanar", "ana", "naive", "mlp-baseline")
TASKS = ("forecast", "granger", "irf", "one-step")
MULTIVARIATE_KINDS = ("var", "vanar")

_VANAR_OPTS = (
    "p", "hidden_dims", "embedding_dim", "force_autoencoder", "epochs",
    "batch_size", "learning_rate", "patience", "validation_fraction",
)


class ConfigError(ValueError):
    """Raised with every validation problem found, one per line."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid config:\n" + "\n".join(f"  - {p}" for p in self.problems))


class TaskError(RuntimeError):
    """One or more tasks failed; carries per-task error messages."""

    def __init__(self, failures):
        self.failures = dict(failures)
        lines = "\n".join(f"  - {task}: {err}" for task, err in failures.items())
        super().__init__("task failures:\n" + lines)


def validate_config(cfg: dict) -> list[str]:
    """All validation problems in ``cfg`` (empty list = valid)."""
    problems = []
    system = cfg.get("system")
    if system is None:
        problems.append("missing 'system' (either \"system1\" or {\"csv\": path})")
    elif system != "system1" and not (isinstance(system, dict) and "csv" in system):
        problems.append(f"'system' must be \"system1\" or {{\"csv\": path}}, got {system!r}")

    if system == "system1":
        try:
            ScenarioSpec(**cfg.get("scenario", {}))
        except (TypeError, ValueError) as exc:
            problems.append(f"bad 'scenario': {exc}")
    elif isinstance(system, dict) and "csv" in system:
        if not Path(system["csv"]).exists():
            problems.append(f"csv file not found: {system['csv']}")

    env = cfg.get("environment", {})
    for key in ("train_len", "test_len"):
        value = env.get(key)
        if not isinstance(value, int) or value <= 0:
            problems.append(f"environment.{key} must be a positive integer, got {value!r}")

    models = cfg.get("models", [])
    if not isinstance(models, list) or not all(isinstance(m, dict) for m in models):
        problems.append("'models' must be a list of objects")
        models = []
    for i, entry in enumerate(models):
        kind = entry.get("kind")
        if kind not in MODEL_KINDS:
            problems.append(f"models[{i}].kind must be one of {MODEL_KINDS}, got {kind!r}")

    tasks = cfg.get("tasks", [])
    for task in tasks:
        if task not in TASKS:
            problems.append(f"unknown task {task!r}; tasks are {TASKS}")
    if tasks and not models and set(tasks) != {"irf"}:
        problems.append("tasks requested but no models configured")

    seeds = cfg.get("seeds", [0])
    if not isinstance(seeds, list) or not all(isinstance(s, int) and s >= 0 for s in seeds) or not seeds:
        problems.append(f"'seeds' must be a nonempty list of nonnegative integers, got {seeds!r}")

    if "granger" in tasks:
        kinds = {m.get("kind") for m in models}
        if not kinds & set(MULTIVARIATE_KINDS):
            problems.append("granger task needs a 'var' or 'vanar' model entry")
    if "irf" in tasks:
        irf = cfg.get("irf", {})
        if system == "system1":
            pass  # defaults exist for the simulated system
        elif "shock_var" not in irf:
            problems.append("irf task on csv data needs irf.shock_var")
        eps = irf.get("epsilon", 0.1)
        if not isinstance(eps, (int, float)):
            problems.append(f"irf.epsilon must be a number, got {eps!r}")

    # referenced variables must exist in the data source
    names = None
    if system == "system1":
        names = ("x", "y")
    elif isinstance(system, dict) and "csv" in system and Path(system["csv"]).exists():
        try:
            with open(system["csv"], "r", encoding="utf-8") as f:
                header = f.readline().strip().split(",")
            names = tuple(h for h in header if h and h != "date")
        except OSError:
            names = None
    if names:
        center = cfg.get("granger", {}).get("center")
        if center is not None and center not in names:
            problems.append(f"granger.center {center!r} not among variables {names}")
        shock = cfg.get("irf", {}).get("shock_var")
        if shock is not None and shock not in names:
            problems.append(f"irf.shock_var {shock!r} not among variables {names}")
    return problems


def load_config(path) -> dict:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def load_preset(name: str) -> dict:
    """Bundled experiment config by name (see ``list_presets``)."""
    ref = resources.files("vanar.presets").joinpath(f"{name}.json")
    if not ref.is_file():
        raise ValueError(f"unknown preset {name!r}; available: {', '.join(list_presets())}")
    return json.loads(ref.read_text(encoding="utf-8"))


def list_presets() -> list[str]:
    names = []
    for entry in resources.files("vanar.presets").iterdir():
        if entry.name.endswith(".json"):
            names.append(entry.name[: -len(".json")])
    return sorted(names)


def _load_data(cfg: dict) -> Dataset:
    env = cfg["environment"]
    total = env["train_len"] + env["test_len"]
    if cfg["system"] == "system1":
        spec = ScenarioSpec(**cfg.get("scenario", {}))
        x0 = tuple(cfg.get("x0", DEFAULT_X0))
        return simulate_scenario(spec, n=total - 1, x0=x0)
    data = read_csv(cfg["system"]["csv"])
    if data.n_obs < total:
        raise ValueError(f"csv has {data.n_obs} rows, need train+test = {total}")
    return data.rows(0, total)


def _resolve_p(cfg: dict, train: Dataset) -> int:
    if cfg.get("p") is not None:
        return check_positive_int(cfg["p"], "p")
    p_max = cfg.get("p_max", 15)
    p_max = min(p_max, max(1, (train.n_obs - 1) // 3))
    return select_lag_aic(train, p_max=p_max, det=cfg.get("det", "none"))


def _vanar_params(entry: dict, p: int, seed: int) -> VanarForecaster:
    opts = {k: entry[k] for k in _VANAR_OPTS if k in entry}
    opts.setdefault("p", p)
    if "hidden_dims" in opts:
        opts["hidden_dims"] = tuple(opts["hidden_dims"])
    return VanarForecaster(seed=seed, **opts)


def _make_model(entry: dict, variables: list[str], p: int, seed: int):
    kind = entry["kind"]
    if kind == "var" or kind == "ar":
        return VarForecaster(p=entry.get("p", p), det=entry.get("det", "none"))
    if kind == "naive":
        return NaiveForecaster()
    if kind == "mlp-baseline":
        opts = dict(entry)
        opts.setdefault("hidden_dims", [256])
        opts.setdefault("force_autoencoder", False)
        return _vanar_params(opts, p, seed)
    return _vanar_params(entry, p, seed)


def _model_label(entry: dict) -> str:
    return entry.get("label", entry["kind"])


def _is_stochastic(kind: str) -> bool:
    return kind in ("vanar", "ana", "mlp-baseline")


def _write_table(path: Path, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])


def _forecast_task(cfg, data, train, test, p, out_dir) -> list[Path]:
    """Appendix-style tables: one CSV per variable, rows = horizon, cols = model."""
    horizons = sorted({min(10, test.n_obs), test.n_obs})
    seeds = cfg.get("seeds", [0])
    per_var: dict[str, dict[str, dict[int, float]]] = {
        v: {} for v in data.names
    }
    for entry in cfg["models"]:
        kind = entry["kind"]
        label = _model_label(entry)
        model_seeds = seeds if _is_stochastic(kind) else seeds[:1]
        univariate = kind in ("ar", "ana", "naive", "mlp-baseline")
        for var in data.names:
            fit_train = train.select([var]) if univariate else train
            errs: dict[int, list[float]] = {h: [] for h in horizons}
            for seed in model_seeds:
                model = _make_model(entry, list(fit_train.names), p, seed).fit(fit_train)
                pred = model.forecast(fit_train, test.n_obs)
                for h in horizons:
                    errs[h].append(rmse(pred.column(var)[:h], test.column(var)[:h]))
            per_var[var][label] = {h: float(np.median(errs[h])) for h in horizons}
    paths = []
    labels = [_model_label(e) for e in cfg["models"]]
    for var in data.names:
        rows = [[h] + [per_var[var][label][h] for label in labels] for h in horizons]
        path = out_dir / f"forecast_{var}.csv"
        _write_table(path, ["horizon"] + labels, rows)
        paths.append(path)
    return paths


def _granger_task(cfg, data, p, out_dir) -> list[Path]:
    seeds = cfg.get("seeds", [0])
    gcfg = cfg.get("granger", {})
    center = gcfg.get("center", data.names[0])
    test_len = gcfg.get("test_len", cfg["environment"]["test_len"])
    paths = []
    for entry in cfg["models"]:
        kind = entry["kind"]
        if kind not in MULTIVARIATE_KINDS:
            continue

        def factory(variables, seed, entry=entry):
            return _make_model(entry, variables, p, seed)

        graph = causality_graph(
            data,
            center,
            factory,
            seeds=seeds if _is_stochastic(kind) else seeds[:1],
            test_len=test_len,
            horizon=gcfg.get("horizon"),
            one_step=gcfg.get("one_step", False),
        )
        rows = [
            [e.source, e.target, e.score, e.full_rmse, e.univariate_rmse]
            for e in graph.edges
        ]
        path = out_dir / f"granger_{_model_label(entry)}.csv"
        _write_table(path, ["source", "target", "score", "full_rmse", "uni_rmse"], rows)
        paths.append(path)
    return paths


def _irf_task(cfg, data, train, p, out_dir) -> list[Path]:
    icfg = cfg.get("irf", {})
    shock_var = icfg.get("shock_var", data.names[-1])
    epsilon = float(icfg.get("epsilon", 0.1))
    horizon = int(icfg.get("horizon", 20))
    seed = cfg.get("seeds", [0])[0]
    paths = []

    def emit(label, shocked_vals, unshocked_vals):
        header, rows = [], []
        response = shocked_vals - unshocked_vals
        for var in data.names:
            header += [f"{var}_shocked", f"{var}_unshocked", f"{var}_response"]
        for t in range(horizon):
            row = []
            for j in range(len(data.names)):
                row += [shocked_vals[t, j], unshocked_vals[t, j], response[t, j]]
            rows.append(row)
        path = out_dir / f"irf_{label}.csv"
        _write_table(path, header, rows)
        paths.append(path)

    for entry in cfg["models"]:
        if entry["kind"] not in MULTIVARIATE_KINDS:
            continue
        model = _make_model(entry, list(train.names), p, seed).fit(train)
        shocked = impulse_path(model, train, shock_var, epsilon, horizon)
        unshocked = impulse_path(model, train, shock_var, 0.0, horizon)
        emit(_model_label(entry), shocked.path.values, unshocked.path.values)

    if cfg["system"] == "system1":
        spec = ScenarioSpec(**cfg.get("scenario", {}))
        params = spec.params()
        shocked = true_impulse_path(params, train, shock_var, epsilon, horizon)
        unshocked = true_impulse_path(params, train, shock_var, 0.0, horizon)
        emit("true", shocked.values, unshocked.values)
    return paths


def _one_step_task(cfg, data, train, test, p, out_dir) -> list[Path]:
    """Rolling one-step scaled errors (and raw RMSE) per variable and model."""
    seeds = cfg.get("seeds", [0])
    labels = [_model_label(e) for e in cfg["models"]]
    rows = []
    for var in data.names:
        cells_rmsse, cells_rmse = [], []
        for entry in cfg["models"]:
            kind = entry["kind"]
            univariate = kind in ("ar", "ana", "naive", "mlp-baseline")
            fit_train = train.select([var]) if univariate else train
            fit_test = test.select([var]) if univariate else test
            model_seeds = seeds if _is_stochastic(kind) else seeds[:1]
            scaled, raw = [], []
            for seed in model_seeds:
                model = _make_model(entry, list(fit_train.names), p, seed).fit(fit_train)
                pred = rolling_one_step(model, fit_train, fit_test)
                last_train = train.column(var)[-1]
                scaled.append(rmsse(pred.column(var), test.column(var), last_train))
                raw.append(rmse(pred.column(var), test.column(var)))
            cells_rmsse.append(float(np.median(scaled)))
            cells_rmse.append(float(np.median(raw)))
        rows.append([var, "rmsse"] + cells_rmsse)
        rows.append([var, "rmse"] + cells_rmse)
    path = out_dir / "onestep.csv"
    _write_table(path, ["variable", "metric"] + labels, rows)
    return [path]


def run(cfg: dict, out_dir) -> dict:
    """Execute a validated config; returns {"manifest": path, "outputs": [paths]}.

    Raises ConfigError (listing every problem) before any work if the
    config is invalid; task failures propagate after the manifest is
    written.
    """
    problems = validate_config(cfg)
    if problems:
        raise ConfigError(problems)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    echo = {k: v for k, v in cfg.items() if k != "output_dir"}
    data = _load_data(cfg)
    env = cfg["environment"]
    train, test = split_dataset(data, env["train_len"], env["test_len"])
    tasks = cfg.get("tasks", [])
    p = _resolve_p(cfg, train) if cfg.get("models") else None

    manifest = {
        "config": echo,
        "lag_order": p,
        "versions": {
            "vanar": __version__,
            "numpy": np.__version__,
            "python": ".".join(map(str, sys.version_info[:3])),
        },
    }
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    outputs: list[Path] = []
    failures: dict[str, str] = {}
    runners = {
        "forecast": lambda: _forecast_task(cfg, data, train, test, p, out_dir),
        "granger": lambda: _granger_task(cfg, data, p, out_dir),
        "irf": lambda: _irf_task(cfg, data, train, p, out_dir),
        "one-step": lambda: _one_step_task(cfg, data, train, test, p, out_dir),
    }
    for task in tasks:
        try:
            outputs += runners[task]()
        except Exception as exc:  # report per task, keep running the rest
            failures[task] = str(exc)
    if failures:
        raise TaskError(failures)
    return {"manifest": manifest_path, "outputs": outputs}
