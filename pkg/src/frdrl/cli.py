"""Command-line harness: cross-validated classification, transductive
clustering, grid search, and rule-base export.

Configuration comes from a flat key=value file plus command-line overrides;
all outputs land under the configured output directory. FRDRL_THREADS caps
the grid-search worker pool; per-cell and per-fold RNG streams are derived
from (master seed, cell index, fold index), so results do not depend on the
pool size.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import Dataset, load_csv, minmax_normalize, stratified_kfold
from .errors import ConfigError, DataError, DivergenceError
from .heads import TrainConfig, TrainTrace, predict, train_classifier, train_clusterer
from .metrics import MetricReport, accuracy, ari, macro_f1, nmi
from .model_io import load_model, save_model
from .rules import render_rulebase, render_rulebase_markdown

_INT_KEYS = {"folds", "seed", "H", "K", "m", "epochs", "knn_k", "fcm_max_iter"}
_FLOAT_KEYS = {"alpha", "beta", "lr", "fuzzifier", "fcm_tol"}
_STR_KEYS = {"data", "out"}
_GRID_KEYS = {"grid_H": int, "grid_K": int, "grid_lr": float, "grid_epochs": int}

_DEFAULTS = {
    "data": None,
    "out": "frdrl-out",
    "folds": 5,
    "seed": 0,
    "graph_space": "fuzzy",
    "dump_similarity": False,
    "H": 10,
    "K": 10,
    "m": None,
    "alpha": 1e-4,
    "beta": 0.01,
    "lr": 5e-5,
    "epochs": 1000,
    "knn_k": 5,
    "bandwidth": "auto",
    "fuzzifier": 2.0,
    "fcm_tol": 1e-5,
    "fcm_max_iter": 100,
    "grid_H": None,
    "grid_K": None,
    "grid_lr": None,
    "grid_epochs": None,
}
# paper protocol defaults differ between the two tasks
_CLUSTER_DEFAULTS = {"K": 5, "m": 20, "epochs": 100}


@dataclass
class ExperimentConfig:
    """Validated, fully resolved settings for one command invocation."""

    task: str
    values: dict


def _cast(key: str, raw: str):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key == "bandwidth":
            return "auto" if raw == "auto" else float(raw)
        if key == "graph_space":
            if raw not in ("fuzzy", "original"):
                raise ValueError("must be 'fuzzy' or 'original'")
            return raw
        if key == "dump_similarity":
            if raw.lower() in ("1", "true", "yes"):
                return True
            if raw.lower() in ("0", "false", "no"):
                return False
            raise ValueError("must be a boolean")
        if key in _GRID_KEYS:
            cast = _GRID_KEYS[key]
            return [cast(part) for part in raw.split(",") if part.strip()]
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for config key {key!r}: {raw!r} ({exc})") from exc


def _read_config_file(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    values = {}
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in _DEFAULTS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = _cast(key, raw.strip())
    return values


def _resolve_config(task: str, args: argparse.Namespace) -> ExperimentConfig:
    """Layer defaults < config file < command-line flags, then task defaults."""
    values = dict(_DEFAULTS)
    explicit = set()
    if getattr(args, "config", None):
        file_values = _read_config_file(args.config)
        values.update(file_values)
        explicit.update(file_values)
    for key in _DEFAULTS:
        flag = getattr(args, key, None)
        if flag is None:
            continue
        values[key] = _cast(key, flag) if isinstance(flag, str) else flag
        explicit.add(key)
    if task == "cluster":
        for key, default in _CLUSTER_DEFAULTS.items():
            if key not in explicit:
                values[key] = default
    return ExperimentConfig(task=task, values=values)


def _train_config(values: dict, seed: int, m: int | None) -> TrainConfig:
    return TrainConfig(
        H=values["H"], K=values["K"], m=m, alpha=values["alpha"], beta=values["beta"],
        lr=values["lr"], epochs=values["epochs"], knn_k=values["knn_k"],
        bandwidth=values["bandwidth"], seed=seed, fuzzifier=values["fuzzifier"],
        fcm_tol=values["fcm_tol"], fcm_max_iter=values["fcm_max_iter"],
    )


def _stream_seed(master: int, cell: int, fold: int) -> int:
    return int(np.random.SeedSequence([master, cell, fold]).generate_state(1)[0])


def _load_dataset(values: dict) -> Dataset:
    if not values["data"]:
        raise ConfigError("no data file given (use --data or the data config key)")
    return minmax_normalize(load_csv(values["data"]))


def _write_csv(path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerows(rows)


def _write_metrics(path, reports: list[MetricReport]) -> None:
    k = len(reports[0].per_fold)
    header = ["name", "mean", "std"] + [f"fold{i + 1}" for i in range(k)]
    _write_csv(path, [header] + [r.csv_row() for r in reports])


def _write_similarity(out_dir: str, S: np.ndarray | None) -> None:
    if S is not None:
        _write_csv(os.path.join(out_dir, "similarity.csv"), [[repr(v) for v in row] for row in S])


def _subset(data: Dataset, idx: np.ndarray) -> Dataset:
    return Dataset(X=data.X[idx], y=data.y[idx], c=data.c, feature_names=list(data.feature_names))


def _classify_cell(data: Dataset, plan, values: dict, cell: int,
                   keep_artifacts: bool = False):
    """5-ish-fold CV of one hyperparameter cell; returns metric lists (+ artifacts)."""
    accs, mf1s, losses, models, sim = [], [], [], [], None
    for fold, (train_idx, test_idx) in enumerate(plan.folds):
        seed = _stream_seed(values["seed"], cell, fold)
        cfg = _train_config(values, seed, values["m"] if values["m"] is not None else data.c)
        trace = TrainTrace() if keep_artifacts else None
        model = train_classifier(_subset(data, train_idx), cfg,
                                 graph_space=values["graph_space"], trace=trace)
        pred = predict(model, data.X[test_idx])
        accs.append(accuracy(pred, data.y[test_idx]))
        mf1s.append(macro_f1(pred, data.y[test_idx], data.c))
        if keep_artifacts:
            losses.append(trace.losses)
            models.append(model)
            if fold == 0:
                sim = trace.similarity
    return accs, mf1s, losses, models, sim


def cmd_classify(config: ExperimentConfig) -> int:
    values = config.values
    data = _load_dataset(values)
    out_dir = values["out"]
    os.makedirs(out_dir, exist_ok=True)
    plan = stratified_kfold(data, values["folds"], values["seed"])

    accs, mf1s, losses, models, sim = _classify_cell(data, plan, values, cell=0, keep_artifacts=True)
    reports = [MetricReport.from_folds("acc", accs), MetricReport.from_folds("mf1", mf1s)]
    _write_metrics(os.path.join(out_dir, "metrics.csv"), reports)

    if losses and losses[0]:
        rows = [["epoch"] + [f"fold{i + 1}" for i in range(len(losses))]]
        for epoch in range(len(losses[0])):
            rows.append([epoch] + [repr(fold_losses[epoch]) for fold_losses in losses])
        _write_csv(os.path.join(out_dir, "loss.csv"), rows)

    best = int(np.argmax(accs))
    save_model(models[best], os.path.join(out_dir, "model.json"))
    if values["dump_similarity"]:
        _write_similarity(out_dir, sim)

    for report in reports:
        print(f"{report.name}: {report.mean:.4f} +/- {report.std:.4f}")
    print(f"best fold: {best + 1} (acc {accs[best]:.4f}); outputs in {out_dir}")
    return 0


def cmd_cluster(config: ExperimentConfig) -> int:
    values = config.values
    data = _load_dataset(values)
    out_dir = values["out"]
    os.makedirs(out_dir, exist_ok=True)

    seed = _stream_seed(values["seed"], 0, 0)
    cfg = _train_config(values, seed, values["m"])
    trace = TrainTrace()
    model, state = train_clusterer(data, cfg, graph_space=values["graph_space"], trace=trace)
    labels = np.argmax(state.U, axis=0)

    reports = [
        MetricReport.from_folds("nmi", [nmi(labels, data.y)]),
        MetricReport.from_folds("ari", [ari(labels, data.y)]),
    ]
    _write_metrics(os.path.join(out_dir, "metrics.csv"), reports)
    _write_csv(os.path.join(out_dir, "partition.csv"),
               [[i, int(label)] for i, label in enumerate(labels)])
    if trace.losses:
        _write_csv(os.path.join(out_dir, "loss.csv"),
                   [["epoch", "loss"]] + [[e, repr(v)] for e, v in enumerate(trace.losses)])
    save_model(model, os.path.join(out_dir, "model.json"))
    if values["dump_similarity"]:
        _write_similarity(out_dir, trace.similarity)

    for report in reports:
        print(f"{report.name}: {report.mean:.4f}")
    print(f"outputs in {out_dir}")
    return 0


def cmd_export_rules(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    feature_names = None
    if args.data:
        try:
            with open(args.data, newline="", encoding="utf-8") as fh:
                header = next(csv.reader(fh))
        except (OSError, StopIteration) as exc:
            raise DataError(f"cannot read data schema from {args.data}: {exc}") from exc
        feature_names = [name.strip() for name in header[:-1]]
        if len(feature_names) != model.antecedent.n_features:
            raise DataError(
                f"data schema has {len(feature_names)} features but the model expects "
                f"{model.antecedent.n_features}"
            )
    out_dir = args.out or "frdrl-out"
    os.makedirs(out_dir, exist_ok=True)
    text = render_rulebase(model, feature_names)
    with open(os.path.join(out_dir, "rules.txt"), "w", encoding="utf-8") as fh:
        fh.write(text)
    with open(os.path.join(out_dir, "rules.md"), "w", encoding="utf-8") as fh:
        fh.write(render_rulebase_markdown(model, feature_names))
        fh.write("\n")
    print(text)
    return 0


def _grid_cells(values: dict) -> list[dict]:
    axes = {
        "H": values["grid_H"] or [values["H"]],
        "K": values["grid_K"] or [values["K"]],
        "lr": values["grid_lr"] or [values["lr"]],
        "epochs": values["grid_epochs"] or [values["epochs"]],
    }
    cells = []
    for combo in itertools.product(axes["H"], axes["K"], axes["lr"], axes["epochs"]):
        cell_values = dict(values)
        cell_values.update(zip(("H", "K", "lr", "epochs"), combo))
        cells.append(cell_values)
    return cells


def _grid_cell_worker(payload):
    """Top-level so a process pool can pickle it."""
    task, data, plan, cell_values, cell = payload
    if task == "classify":
        accs, mf1s, _, _, _ = _classify_cell(data, plan, cell_values, cell)
        return cell, (float(np.mean(accs)), float(np.std(accs)),
                      float(np.mean(mf1s)), float(np.std(mf1s)))
    seed = _stream_seed(cell_values["seed"], cell, 0)
    cfg = _train_config(cell_values, seed, cell_values["m"])
    _, state = train_clusterer(data, cfg, graph_space=cell_values["graph_space"])
    labels = np.argmax(state.U, axis=0)
    return cell, (nmi(labels, data.y), 0.0, ari(labels, data.y), 0.0)


def cmd_grid(config: ExperimentConfig) -> int:
    values = config.values
    if not any(values[key] for key in _GRID_KEYS):
        raise ConfigError("grid needs at least one of grid_H, grid_K, grid_lr, grid_epochs")
    data = _load_dataset(values)
    out_dir = values["out"]
    os.makedirs(out_dir, exist_ok=True)
    plan = stratified_kfold(data, values["folds"], values["seed"]) if config.task == "classify" else None

    cells = _grid_cells(values)
    payloads = [(config.task, data, plan, cell_values, cell)
                for cell, cell_values in enumerate(cells)]
    try:
        workers = max(1, int(os.environ.get("FRDRL_THREADS", "1")))
    except ValueError:
        workers = 1
    if workers > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(payloads))) as pool:
            results = dict(pool.map(_grid_cell_worker, payloads))
    else:
        results = dict(map(_grid_cell_worker, payloads))

    metric_names = ("acc", "mf1") if config.task == "classify" else ("nmi", "ari")
    ranked = sorted(range(len(cells)), key=lambda cell: (-results[cell][0], cell))
    header = ["rank", "H", "K", "lr", "epochs",
              f"{metric_names[0]}_mean", f"{metric_names[0]}_std",
              f"{metric_names[1]}_mean", f"{metric_names[1]}_std"]
    rows = [header]
    for rank, cell in enumerate(ranked, start=1):
        cv = cells[cell]
        rows.append([rank, cv["H"], cv["K"], repr(cv["lr"]), cv["epochs"]]
                    + [repr(v) for v in results[cell]])
    _write_csv(os.path.join(out_dir, "grid.csv"), rows)

    best = ranked[0]
    print(f"{len(cells)} cells; best: H={cells[best]['H']} K={cells[best]['K']} "
          f"lr={cells[best]['lr']} epochs={cells[best]['epochs']} "
          f"{metric_names[0]}={results[best][0]:.4f}")
    print(f"grid results in {os.path.join(out_dir, 'grid.csv')}")
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--data", help="CSV dataset (header row, label in the last column)")
    parser.add_argument("--out", help="output directory (default frdrl-out)")
    parser.add_argument("--folds", type=int, help="cross-validation fold count")
    parser.add_argument("--seed", type=int, help="master RNG seed")
    parser.add_argument("--graph-space", dest="graph_space", choices=("fuzzy", "original"),
                        help="space the similarity graph is built in")
    parser.add_argument("--dump-similarity", dest="dump_similarity", action="store_true",
                        default=None, help="also write the similarity matrix as CSV")
    parser.add_argument("--H", type=int, help="rule count")
    parser.add_argument("--K", type=int, help="optimization block count")
    parser.add_argument("--m", type=int, help="output dimension (classify: forced to class count)")
    parser.add_argument("--alpha", type=float, help="sparsity weight / threshold init numerator")
    parser.add_argument("--beta", type=float, help="ridge weight on the final consequents")
    parser.add_argument("--lr", type=float, help="outer learning rate")
    parser.add_argument("--epochs", type=int, help="training epochs")
    parser.add_argument("--knn-k", dest="knn_k", type=int, help="graph neighbor count")
    parser.add_argument("--bandwidth", help="kernel bandwidth ('auto' or a positive real)")
    parser.add_argument("--fuzzifier", type=float, help="FCM fuzzifier")
    parser.add_argument("--fcm-tol", dest="fcm_tol", type=float, help="FCM center-shift tolerance")
    parser.add_argument("--fcm-max-iter", dest="fcm_max_iter", type=int, help="FCM iteration cap")
    parser.add_argument("--grid-H", dest="grid_H", help="comma list of rule counts")
    parser.add_argument("--grid-K", dest="grid_K", help="comma list of block counts")
    parser.add_argument("--grid-lr", dest="grid_lr", help="comma list of learning rates")
    parser.add_argument("--grid-epochs", dest="grid_epochs", help="comma list of epoch counts")


def _build_parser() -> _Parser:
    parser = _Parser(prog="frdrl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("classify", "cluster"):
        _add_common_flags(sub.add_parser(name))
    grid = sub.add_parser("grid")
    grid.add_argument("--task", choices=("classify", "cluster"), default="classify")
    _add_common_flags(grid)
    export = sub.add_parser("export-rules")
    export.add_argument("--model", required=True, help="saved model JSON")
    export.add_argument("--out", help="output directory (default frdrl-out)")
    export.add_argument("--data", help="CSV whose header provides feature names")
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        if args.command == "export-rules":
            return cmd_export_rules(args)
        if args.command == "classify":
            return cmd_classify(_resolve_config("classify", args))
        if args.command == "cluster":
            return cmd_cluster(_resolve_config("cluster", args))
        return cmd_grid(_resolve_config(args.task, args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        print(f"numerical divergence: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
