"""Model persistence as a versioned JSON document with full-precision reals."""

from __future__ import annotations

import json

import numpy as np

from .antecedent import FuzzyAntecedent
from .errors import DataError
from .heads import Model, TrainConfig
from .solver import UnrolledStack

FORMAT_ID = "frdrl-model-v1"


def _matrix(a: np.ndarray) -> list:
    return np.asarray(a, dtype=float).tolist()


def save_model(model: Model, path) -> None:
    """Write a model to a JSON document tagged with the format id."""
    doc = {
        "format": FORMAT_ID,
        "task": model.task,
        "config": {
            "H": model.config.H,
            "K": model.config.K,
            "m": model.config.m,
            "alpha": model.config.alpha,
            "beta": model.config.beta,
            "lr": model.config.lr,
            "epochs": model.config.epochs,
            "knn_k": model.config.knn_k,
            "bandwidth": model.config.bandwidth,
            "seed": model.config.seed,
            "fuzzifier": model.config.fuzzifier,
            "fcm_tol": model.config.fcm_tol,
            "fcm_max_iter": model.config.fcm_max_iter,
        },
        "antecedent": {
            "H": model.antecedent.n_rules,
            "E": _matrix(model.antecedent.E),
            "Q": _matrix(model.antecedent.Q),
        },
        "stack": {
            "K": model.stack.n_blocks,
            "m": model.stack.n_outputs,
            "theta": model.stack.theta,
            "G": [_matrix(G) for G in model.stack.G],
            "P0": _matrix(model.stack.P0),
        },
        "P_final": _matrix(model.P_final),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_model(path) -> Model:
    """Read a model document back; any structural problem raises DataError."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read model file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"corrupt model file {path}: {exc}") from exc
    try:
        if doc["format"] != FORMAT_ID:
            raise DataError(f"unsupported model format {doc.get('format')!r} in {path}")
        config = TrainConfig(**doc["config"])
        antecedent = FuzzyAntecedent(
            E=np.array(doc["antecedent"]["E"], dtype=float),
            Q=np.array(doc["antecedent"]["Q"], dtype=float),
        )
        if antecedent.n_rules != doc["antecedent"]["H"]:
            raise DataError(f"model file {path}: rule count does not match center matrix")
        stack = UnrolledStack(
            G=[np.array(G, dtype=float) for G in doc["stack"]["G"]],
            theta=float(doc["stack"]["theta"]),
            P0=np.array(doc["stack"]["P0"], dtype=float),
        )
        if stack.n_blocks != doc["stack"]["K"] or stack.n_outputs != doc["stack"]["m"]:
            raise DataError(f"model file {path}: stack dimensions do not match")
        task = doc["task"]
        P_final = np.array(doc["P_final"], dtype=float)
    except DataError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"corrupt model file {path}: {exc}") from exc
    if task not in ("classification", "clustering"):
        raise DataError(f"model file {path}: unknown task {task!r}")
    return Model(antecedent=antecedent, stack=stack, P_final=P_final, config=config, task=task)
