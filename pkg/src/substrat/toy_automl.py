"""Built-in toy AutoML backend.

A miniature grid search over categorical models (majority class, one-rule,
naive Bayes with two smoothing settings) that speaks the same fit/score
contract as a real AutoML adapter. It reads CSVs as raw string tables,
independent of the interning machinery, exactly like an external tool would.
Run as a module (python -m substrat.toy_automl) it serves the line-delimited
JSON adapter protocol over stdin/stdout.
"""
from __future__ import annotations

import json
import math
import sys
import time
from collections import Counter, defaultdict

import numpy as np

MODEL_FAMILIES = ("majority", "one_rule", "naive_bayes")

# evaluation order of the zoo; restriction filters this list
CANDIDATES = (
    ("majority", {}),
    ("one_rule", {}),
    ("naive_bayes", {"laplace": 0.1}),
    ("naive_bayes", {"laplace": 1.0}),
)


def _read_table(path: str, target: str) -> tuple[list[str], list[list[str]], int]:
    import csv

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        rows = list(reader)
    if header is None or not rows:
        raise ValueError(f"{path}: empty data file")
    if target not in header:
        raise ValueError(f"target {target!r} not in header")
    return header, rows, header.index(target)


def _stratified_split(labels: list[str], seed: int) -> tuple[list[int], list[int]]:
    """80/20 split keeping class proportions; singleton classes stay in
    train. Falls back to scoring on train when nothing is left over."""
    rng = np.random.default_rng(seed)
    groups: dict[str, list[int]] = defaultdict(list)
    for i, y in enumerate(labels):
        groups[y].append(i)
    train: list[int] = []
    hold: list[int] = []
    for y in sorted(groups):
        idx = groups[y]
        perm = rng.permutation(len(idx))
        n_train = max(1, int(0.8 * len(idx)))
        train.extend(idx[p] for p in perm[:n_train])
        hold.extend(idx[p] for p in perm[n_train:])
    if not hold:
        hold = list(train)
    return sorted(train), sorted(hold)


# ---------------------------------------------------------------- families

def _train_majority(header, rows, target_idx, train_idx, params):
    counts = Counter(rows[i][target_idx] for i in train_idx)
    # ties break to the lexicographically smallest label
    label = min(counts, key=lambda y: (-counts[y], y))
    return {"label": label}


def _predict_majority(blob, colmap, row):
    return blob["label"]


def _train_one_rule(header, rows, target_idx, train_idx, params):
    majority = _train_majority(header, rows, target_idx, train_idx, params)["label"]
    best = None
    for j, name in enumerate(header):
        if j == target_idx:
            continue
        by_value: dict[str, Counter] = defaultdict(Counter)
        for i in train_idx:
            by_value[rows[i][j]][rows[i][target_idx]] += 1
        rule = {v: min(c, key=lambda y: (-c[y], y)) for v, c in by_value.items()}
        correct = sum(c[rule[v]] for v, c in by_value.items())
        acc = correct / len(train_idx)
        if best is None or acc > best[0]:
            best = (acc, name, rule)
    return {"column": best[1], "rule": best[2], "default": majority}


def _predict_one_rule(blob, colmap, row):
    return blob["rule"].get(row[colmap[blob["column"]]], blob["default"])


def _train_naive_bayes(header, rows, target_idx, train_idx, params):
    laplace = params["laplace"]
    class_counts = Counter(rows[i][target_idx] for i in train_idx)
    features = {}
    for j, name in enumerate(header):
        if j == target_idx:
            continue
        counts: dict[str, Counter] = defaultdict(Counter)
        for i in train_idx:
            counts[rows[i][j]][rows[i][target_idx]] += 1
        features[name] = {v: dict(c) for v, c in counts.items()}
    return {
        "laplace": laplace,
        "classes": sorted(class_counts),
        "class_counts": dict(class_counts),
        "features": features,
    }


def _predict_naive_bayes(blob, colmap, row):
    laplace = blob["laplace"]
    total = sum(blob["class_counts"].values())
    best_label, best_score = None, -math.inf
    for y in blob["classes"]:
        n_y = blob["class_counts"][y]
        score = math.log(n_y / total)
        for name, table in blob["features"].items():
            vocab = len(table)
            count = table.get(row[colmap[name]], {}).get(y, 0)
            score += math.log((count + laplace) / (n_y + laplace * max(vocab, 1)))
        if score > best_score:
            best_label, best_score = y, score
    return best_label


_TRAIN = {"majority": _train_majority, "one_rule": _train_one_rule,
          "naive_bayes": _train_naive_bayes}
_PREDICT = {"majority": _predict_majority, "one_rule": _predict_one_rule,
            "naive_bayes": _predict_naive_bayes}


def _accuracy(family, blob, header, rows, target_idx, idx):
    predict = _PREDICT[family]
    colmap = {name: j for j, name in enumerate(header)}
    hits = sum(predict(blob, colmap, rows[i]) == rows[i][target_idx] for i in idx)
    return hits / len(idx)


# ---------------------------------------------------------------- fit/score

def fit(data_path: str, target: str, *, time_budget_s: float = 60.0,
        eval_budget: int | None = None, restrict_family: str | None = None,
        seed: int = 0) -> dict:
    """Grid-search the zoo within the budget, return the best-by-holdout
    model. eval_budget (candidate count) takes precedence over the wall-clock
    budget and makes the result bit-reproducible."""
    if eval_budget is not None and eval_budget < 1:
        raise ValueError("eval_budget must be positive")
    start = time.perf_counter()
    header, rows, target_idx = _read_table(data_path, target)
    labels = [r[target_idx] for r in rows]
    train_idx, hold_idx = _stratified_split(labels, seed)

    if len(set(labels[i] for i in train_idx)) == 1:
        # constant target: nothing to learn, majority class is the model
        blob = _train_majority(header, rows, target_idx, train_idx, {})
        acc = _accuracy("majority", blob, header, rows, target_idx, hold_idx)
        return {"model_family": "majority", "config_blob": _encode_blob("majority", blob),
                "accuracy": acc, "wall_time_s": time.perf_counter() - start, "evals": 1}

    pool = [c for c in CANDIDATES
            if restrict_family is None or c[0] == restrict_family]
    if not pool:
        raise ValueError(f"unknown family {restrict_family!r}")

    best = None
    evals = 0
    for family, params in pool:
        if eval_budget is not None and evals >= eval_budget:
            break
        if eval_budget is None and evals > 0 and \
                time.perf_counter() - start >= time_budget_s:
            break
        blob = _TRAIN[family](header, rows, target_idx, train_idx, params)
        acc = _accuracy(family, blob, header, rows, target_idx, hold_idx)
        evals += 1
        if best is None or acc > best[0]:
            best = (acc, family, blob)

    acc, family, blob = best
    return {"model_family": family, "config_blob": _encode_blob(family, blob),
            "accuracy": acc, "wall_time_s": time.perf_counter() - start,
            "evals": evals}


def _encode_blob(family: str, blob: dict) -> str:
    return json.dumps({"family": family, "model": blob}, sort_keys=True)


def score(data_path: str, target: str, *, model_family: str, config_blob: str,
          seed: int = 0) -> dict:
    """Apply an already-trained model to the holdout split of the given data
    (same split as a fit with the same seed would use)."""
    start = time.perf_counter()
    header, rows, target_idx = _read_table(data_path, target)
    payload = json.loads(config_blob)
    if payload.get("family") != model_family:
        raise ValueError("config_blob family does not match model_family")
    labels = [r[target_idx] for r in rows]
    _, hold_idx = _stratified_split(labels, seed)
    acc = _accuracy(model_family, payload["model"], header, rows, target_idx, hold_idx)
    return {"accuracy": acc, "wall_time_s": time.perf_counter() - start}


# ---------------------------------------------------------------- protocol

def serve(stdin=None, stdout=None) -> None:
    """Line-delimited JSON adapter protocol: one request object per line,
    one response object per line. Never crashes on bad input."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout

    def reply(obj):
        stdout.write(json.dumps(obj, sort_keys=True) + "\n")
        stdout.flush()

    for line in stdin:
        if not line.strip():
            continue
        try:
            req = json.loads(line)
            op = req.get("op")
        except (json.JSONDecodeError, AttributeError):
            reply({"ok": False, "error": "protocol"})
            continue
        if op == "shutdown":
            reply({"ok": True})
            return
        try:
            if op == "fit":
                out = fit(req["data_path"], req["target"],
                          time_budget_s=req.get("time_budget_s") or 60.0,
                          eval_budget=req.get("eval_budget"),
                          restrict_family=req.get("restrict_family"),
                          seed=int(req.get("seed") or 0))
                if req.get("eval_budget") is not None:
                    out["wall_time_s"] = 0.0  # keep responses byte-reproducible
                reply({"ok": True, **out})
            elif op == "score":
                out = score(req["data_path"], req["target"],
                            model_family=req["model_family"],
                            config_blob=req["config_blob"],
                            seed=int(req.get("seed") or 0))
                reply({"ok": True, **out})
            else:
                reply({"ok": False, "error": "protocol"})
        except KeyError:
            reply({"ok": False, "error": "protocol"})
        except Exception as exc:
            reply({"ok": False, "error": str(exc)})


if __name__ == "__main__":
    serve()
