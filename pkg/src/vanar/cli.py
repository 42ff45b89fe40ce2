"""Command-line interface.

Subcommands: simulate, fit-var, fit-vanar, forecast, granger, irf, run,
ingest. Outputs are CSV or JSON only; every stochastic step takes an
explicit seed so runs can be reproduced exactly.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .causality import causality_graph
from .dataset import Dataset, read_csv, write_csv
from .experiment import ConfigError, TaskError, list_presets, load_config, load_preset, run
from .impulse import impulse_path
from .simulate import DEFAULT_X0, ScenarioSpec, simulate_scenario
from .var import VarForecaster, select_lag_aic
from .vanar import VanarForecaster


def ingest_csv(path, aggregate: str | None = None, log_columns=(), return_dates: bool = False):
    """Load a CSV, optionally mean-aggregating monthly rows to quarters
    and log-transforming named columns.

    Aggregation requires a row count divisible by 3 (each quarter averages
    three consecutive rows); log transforms reject non-positive values. A
    ``date`` column is carried through unchanged when not aggregating.
    """
    data, dates = read_csv(path, return_dates=True)
    if aggregate not in (None, "quarterly"):
        raise ValueError(f"unknown aggregation {aggregate!r}; only 'quarterly' is supported")
    values = data.values
    if aggregate == "quarterly":
        if data.n_obs % 3 != 0:
            raise ValueError(
                f"cannot aggregate to quarterly: {data.n_obs} rows is not a multiple of 3"
            )
        values = values.reshape(data.n_obs // 3, 3, data.n_vars).mean(axis=1)
        dates = None  # month labels no longer line up with rows
    if log_columns:
        values = values.copy()
        for name in log_columns:
            j = data.index_of(name)
            if np.any(values[:, j] <= 0):
                raise ValueError(f"log of non-positive value in column {name!r}")
            values[:, j] = np.log(values[:, j])
    out = Dataset(data.names, values, freq="quarterly" if aggregate else data.freq)
    return (out, dates) if return_dates else out


def _load_model(path: Path):
    text = Path(path).read_text(encoding="utf-8")
    kind = json.loads(text).get("model")
    if kind == "var":
        return VarForecaster.from_json(text)
    if kind == "vanar":
        return VanarForecaster.from_json(text)
    raise ValueError(f"unrecognized model document {path} (model={kind!r})")


def _add_simulate(sub):
    p = sub.add_parser("simulate", help="emit a benchmark-system trajectory as CSV")
    p.add_argument("--scenario", default="default",
                   choices=("default", "nointeraction", "noise1", "noise2"))
    p.add_argument("--n", type=int, default=1000, help="steps after the initial state")
    p.add_argument("--seed", type=int, default=0, help="observation-noise seed")
    p.add_argument("--x0", type=float, nargs=2, default=list(DEFAULT_X0),
                   metavar=("X0", "Y0"))
    p.add_argument("--out", required=True, help="output CSV path")

    def cmd(args):
        spec = ScenarioSpec(kind=args.scenario, seed=args.seed)
        data = simulate_scenario(spec, n=args.n, x0=tuple(args.x0))
        write_csv(data, args.out)
        print(f"wrote {data.n_obs} rows to {args.out}")

    p.set_defaults(func=cmd)


def _add_fit_var(sub):
    p = sub.add_parser("fit-var", help="fit a linear VAR by least squares")
    p.add_argument("--data", required=True, help="training CSV")
    p.add_argument("--p", type=int, default=None, help="lag order (default: AIC)")
    p.add_argument("--p-max", type=int, default=15)
    p.add_argument("--det", default="none", choices=("none", "constant", "constant+trend"))
    p.add_argument("--out", required=True, help="model JSON path")

    def cmd(args):
        data = read_csv(args.data)
        p_order = args.p or select_lag_aic(data, args.p_max, det=args.det)
        model = VarForecaster(p=p_order, det=args.det).fit(data)
        Path(args.out).write_text(model.to_json(), encoding="utf-8")
        print(f"fit VAR-{p_order} (det={args.det}) on {data.n_obs} rows -> {args.out}")

    p.set_defaults(func=cmd)


def _add_fit_vanar(sub):
    p = sub.add_parser("fit-vanar", help="fit a neural autoregression")
    p.add_argument("--data", required=True, help="training CSV")
    p.add_argument("--p", type=int, default=None, help="lag order (default: AIC)")
    p.add_argument("--p-max", type=int, default=15)
    p.add_argument("--hidden", type=int, nargs="+", default=[256, 256])
    p.add_argument("--embedding-dim", type=int, default=None)
    p.add_argument("--force-autoencoder", choices=("on", "off"), default=None)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--learning-rate", type=float, default=1e-2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="model JSON path")
    p.add_argument("--loss-history", default=None,
                   help="optional CSV of per-epoch train/validation losses per head")

    def cmd(args):
        data = read_csv(args.data)
        force = None if args.force_autoencoder is None else args.force_autoencoder == "on"
        model = VanarForecaster(
            p=args.p,
            p_max=args.p_max,
            hidden_dims=tuple(args.hidden),
            embedding_dim=args.embedding_dim,
            force_autoencoder=force,
            epochs=args.epochs,
            batch_size=args.batch_size,
            learning_rate=args.learning_rate,
            seed=args.seed,
        ).fit(data)
        Path(args.out).write_text(model.to_json(), encoding="utf-8")
        if args.loss_history:
            with open(args.loss_history, "w", encoding="utf-8", newline="") as f:
                f.write("variable,epoch,train_loss,val_loss\n")
                for name, hist in zip(model.names_, model.train_histories_):
                    for ep, (tr, vl) in enumerate(zip(hist.train_losses, hist.val_losses), 1):
                        f.write(f"{name},{ep},{tr!r},{vl!r}\n")
        state = "activated" if model.activated_ else "deactivated"
        print(f"fit VANAR-{model.p_} ({state} autoencoder) on {data.n_obs} rows -> {args.out}")

    p.set_defaults(func=cmd)


def _add_forecast(sub):
    p = sub.add_parser("forecast", help="recursive h-step forecast from a fitted model")
    p.add_argument("--model", required=True, help="model JSON from fit-var/fit-vanar")
    p.add_argument("--data", required=True, help="history CSV")
    p.add_argument("--h", type=int, required=True, help="horizon")
    p.add_argument("--out", required=True, help="forecast CSV path")

    def cmd(args):
        model = _load_model(args.model)
        history = read_csv(args.data)
        pred = model.forecast(history, args.h)
        write_csv(pred, args.out)
        print(f"wrote {args.h}-step forecast to {args.out}")

    p.set_defaults(func=cmd)


def _add_granger(sub):
    p = sub.add_parser("granger", help="directed causality scores around a center variable")
    p.add_argument("--data", required=True, help="CSV with at least 2 variables")
    p.add_argument("--center", default=None, help="center variable (default: first column)")
    p.add_argument("--model", default="vanar", choices=("var", "vanar"))
    p.add_argument("--p", type=int, default=None, help="lag order (default: AIC)")
    p.add_argument("--p-max", type=int, default=15)
    p.add_argument("--test-len", type=int, default=20)
    p.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    p.add_argument("--one-step", action="store_true",
                   help="score on rolling one-step error instead of recursive")
    p.add_argument("--out", required=True, help="edge-list CSV path")

    def cmd(args):
        data = read_csv(args.data)
        center = args.center or data.names[0]
        train = data.rows(0, data.n_obs - args.test_len)
        p_order = args.p or select_lag_aic(train, args.p_max)
        if args.model == "var":
            def factory(variables, seed):
                return VarForecaster(p=p_order)
            seeds = args.seeds[:1]
        else:
            def factory(variables, seed):
                return VanarForecaster(p=p_order, seed=seed)
            seeds = args.seeds
        graph = causality_graph(
            data, center, factory, seeds=seeds,
            test_len=args.test_len, one_step=args.one_step,
        )
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            f.write("source,target,score,full_rmse,uni_rmse\n")
            for e in graph.edges:
                f.write(f"{e.source},{e.target},{e.score!r},{e.full_rmse!r},{e.univariate_rmse!r}\n")
        causal = [f"{e.source}->{e.target}" for e in graph.positive_edges()]
        print(f"wrote {len(graph.edges)} edges to {args.out}; causal: {', '.join(causal) or 'none'}")

    p.set_defaults(func=cmd)


def _add_irf(sub):
    p = sub.add_parser("irf", help="impulse path, unshocked path, and response")
    p.add_argument("--model", required=True, help="fitted model JSON")
    p.add_argument("--data", required=True, help="history CSV (shock hits its last row)")
    p.add_argument("--shock-var", required=True)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--h", type=int, default=20, help="horizon")
    p.add_argument("--out", required=True, help="response CSV path")

    def cmd(args):
        model = _load_model(args.model)
        base = read_csv(args.data)
        shocked = impulse_path(model, base, args.shock_var, args.epsilon, args.h)
        unshocked = impulse_path(model, base, args.shock_var, 0.0, args.h)
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            header = []
            for var in base.names:
                header += [f"{var}_shocked", f"{var}_unshocked", f"{var}_response"]
            f.write(",".join(header) + "\n")
            for t in range(args.h):
                row = []
                for j in range(base.n_vars):
                    s = shocked.path.values[t, j]
                    u = unshocked.path.values[t, j]
                    row += [repr(s), repr(u), repr(s - u)]
                f.write(",".join(row) + "\n")
        print(f"wrote impulse response (shock {args.epsilon} on {args.shock_var}) to {args.out}")

    p.set_defaults(func=cmd)


def _add_run(sub):
    p = sub.add_parser("run", help="config-driven experiment (simulate, fit, report)")
    p.add_argument("--config", default=None, help="experiment config JSON")
    p.add_argument("--preset", default=None,
                   help=f"bundled config; one of: {', '.join(list_presets())}")
    p.add_argument("--seed", type=int, default=None, help="override scenario seed")
    p.add_argument("--out", default=None, help="output directory")

    def cmd(args):
        if (args.config is None) == (args.preset is None):
            raise SystemExit("run: provide exactly one of --config or --preset")
        cfg = load_config(args.config) if args.config else load_preset(args.preset)
        if args.seed is not None:
            cfg.setdefault("scenario", {})["seed"] = args.seed
        out_dir = args.out or cfg.get("output_dir") or "vanar-out"
        try:
            result = run(cfg, out_dir)
        except ConfigError as exc:
            print(exc, file=sys.stderr)
            raise SystemExit(2)
        except TaskError as exc:
            print(exc, file=sys.stderr)
            raise SystemExit(1)
        print(f"manifest: {result['manifest']}")
        for path in result["outputs"]:
            print(f"wrote {path}")

    p.set_defaults(func=cmd)


def _add_ingest(sub):
    p = sub.add_parser("ingest", help="clean a raw CSV into model-ready form")
    p.add_argument("--data", required=True, help="raw CSV")
    p.add_argument("--aggregate", action="store_true",
                   help="mean-aggregate monthly rows to quarterly")
    p.add_argument("--log-columns", default="",
                   help="comma-separated columns to log-transform")
    p.add_argument("--out", required=True, help="clean CSV path")

    def cmd(args):
        log_cols = [c for c in args.log_columns.split(",") if c]
        data, dates = ingest_csv(
            args.data,
            aggregate="quarterly" if args.aggregate else None,
            log_columns=log_cols,
            return_dates=True,
        )
        write_csv(data, args.out, dates=dates)
        print(f"wrote {data.n_obs} rows x {data.n_vars} variables to {args.out}")

    p.set_defaults(func=cmd)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vanar",
        description="Linear and neural vector autoregression: forecasting, "
                    "causality, and impulse-response analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_simulate(sub)
    _add_fit_var(sub)
    _add_fit_vanar(sub)
    _add_forecast(sub)
    _add_granger(sub)
    _add_irf(sub)
    _add_run(sub)
    _add_ingest(sub)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
