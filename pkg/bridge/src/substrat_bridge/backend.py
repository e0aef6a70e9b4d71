"""The sklearn-grid backend: a bounded, seeded randomized search over a
handful of estimator families.

Every family the search can emit appears in MODEL_FAMILIES, so a
restrict_family request is always enforceable by filtering the family list
before any candidate is drawn. The fitted winner is serialized whole
(zlib + pickle + base64) into config_blob so a later score request can apply
the exact trained pipeline to new data.
"""
from __future__ import annotations

import base64
import math
import pickle
import time
import zlib

import numpy as np
from sklearn.linear_model import LogisticRegression
from sklearn.model_selection import train_test_split
from sklearn.neighbors import KNeighborsClassifier
from sklearn.pipeline import Pipeline
from sklearn.preprocessing import OneHotEncoder
from sklearn.tree import DecisionTreeClassifier

from substrat_bridge.data import load_table


def _logistic(rng, seed):
    return LogisticRegression(C=float(10 ** rng.uniform(-2, 2)), max_iter=200)


def _tree(rng, seed):
    return DecisionTreeClassifier(max_depth=int(rng.integers(2, 13)),
                                  min_samples_leaf=int(rng.integers(1, 9)),
                                  random_state=seed)


def _knn(rng, seed):
    return KNeighborsClassifier(n_neighbors=int(rng.integers(1, 12)))


MODEL_FAMILIES = {
    "logistic_regression": _logistic,
    "decision_tree": _tree,
    "knn": _knn,
}


def _decode_blob(config_blob: str) -> tuple[list[str], Pipeline]:
    """(training feature names, fitted pipeline)."""
    return pickle.loads(zlib.decompress(base64.b64decode(config_blob)))


def _encode_blob(feature_names, pipeline) -> str:
    payload = pickle.dumps((list(feature_names), pipeline))
    return base64.b64encode(zlib.compress(payload, 6)).decode("ascii")


def _split(X, y, seed):
    # holdout never seen by the search; stratify only when every class has
    # two members and the holdout is big enough to hold one of each
    counts = {}
    for label in y:
        counts[label] = counts.get(label, 0) + 1
    holdout_size = math.ceil(0.2 * len(y))
    stratify = y if (len(counts) >= 2 and min(counts.values()) >= 2
                     and holdout_size >= len(counts)) else None
    return train_test_split(X, y, test_size=0.2, random_state=seed,
                            stratify=stratify)


def fit(data_path: str, target: str, *, time_budget_s: float = 60.0,
        eval_budget: int | None = None, restrict_family: str | None = None,
        seed: int = 0) -> dict:
    """Randomized search under the budget; returns the protocol fit payload.

    eval_budget counts candidate configurations and makes the run (and its
    reported wall_time_s of 0.0) reproducible byte for byte.
    """
    if eval_budget is not None and eval_budget < 1:
        raise ValueError("eval_budget must be positive")
    start = time.perf_counter()
    names, X, y = load_table(data_path, target)
    X_train, X_hold, y_train, y_hold = _split(X, y, seed)

    families = list(MODEL_FAMILIES)
    if restrict_family is not None:
        if restrict_family not in MODEL_FAMILIES:
            raise ValueError(f"unknown family {restrict_family!r}")
        families = [restrict_family]

    rng = np.random.default_rng(seed)
    budget = eval_budget if eval_budget is not None else 30
    best = None
    evals = 0
    for i in range(budget):
        if eval_budget is None and evals > 0 and \
                time.perf_counter() - start >= time_budget_s:
            break
        family = families[i % len(families)]
        estimator = MODEL_FAMILIES[family](rng, seed)
        pipeline = Pipeline([
            ("encode", OneHotEncoder(handle_unknown="ignore")),
            ("model", estimator),
        ])
        pipeline.fit(X_train, y_train)
        acc = float(pipeline.score(X_hold, y_hold))
        evals += 1
        if best is None or acc > best[0]:
            best = (acc, family, pipeline)

    acc, family, pipeline = best
    wall = 0.0 if eval_budget is not None else time.perf_counter() - start
    return {"model_family": family, "config_blob": _encode_blob(names, pipeline),
            "accuracy": acc, "wall_time_s": wall, "evals": evals}


def score(data_path: str, target: str, *, model_family: str, config_blob: str,
          seed: int = 0) -> dict:
    """Apply a previously fitted pipeline to the holdout split of the given
    data (the same split a fit with this seed would hold out). The model was
    possibly trained on a column subset: only its own feature columns are
    fed to it, selected by name."""
    names, X, y = load_table(data_path, target)
    trained_names, pipeline = _decode_blob(config_blob)
    missing = [n for n in trained_names if n not in names]
    if missing:
        raise ValueError(f"score data lacks model features: {missing}")
    X = X[:, [names.index(n) for n in trained_names]]
    _, X_hold, _, y_hold = _split(X, y, seed)
    acc = float(pipeline.score(X_hold, y_hold))
    # reported time pinned to 0.0: score responses participate in recorded
    # transcripts, which must replay byte-identically
    return {"accuracy": acc, "wall_time_s": 0.0}
