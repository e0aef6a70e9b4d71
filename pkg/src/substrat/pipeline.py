"""The subset-then-fine-tune workflow.

Three steps: (1) find a measure-preserving subset, (2) run an AutoML adapter
on the subset to get an intermediate configuration, (3) run the adapter on
the full data restricted to the intermediate model family (or, without
fine-tuning, re-score the intermediate model on the full data's holdout).
Adapters are either the built-in toy backend (in-process) or any external
process speaking the line-delimited JSON protocol.
"""
from __future__ import annotations

import json
import math
import os
import queue
import shlex
import subprocess
import tempfile
import threading
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from substrat import toy_automl
from substrat.baselines import run_baseline
from substrat.dataset import Dataset, SubsetIndices, default_subset_size, view
from substrat.errors import (
    AdapterProtocolError,
    AdapterTimeoutError,
    AdapterUnavailableError,
)
from substrat.gendst import GaParams, SearchResult, run_gendst
from substrat.measures import MeasureLike


@dataclass
class ModelConfig:
    """Opaque AutoML output: family name, serialized configuration, holdout
    accuracy, and the wall time the fit took (measured by the caller)."""

    model_family: str
    config_blob: str
    accuracy: float
    wall_time_s: float
    evals: int = 0

    def __post_init__(self):
        if not self.model_family:
            raise ValueError("model_family must be non-empty")
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValueError(f"accuracy {self.accuracy} outside [0, 1]")
        if self.wall_time_s < 0:
            raise ValueError("wall_time_s must be >= 0")

    def to_dict(self, deterministic: bool = False) -> dict:
        d = asdict(self)
        if deterministic:
            d["wall_time_s"] = None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        d = dict(d)
        if d.get("wall_time_s") is None:
            d["wall_time_s"] = 0.0
        return cls(**d)


@dataclass
class FitRequest:
    data_path: str
    target: str
    time_budget_s: float = 60.0
    eval_budget: Optional[int] = None
    restrict_family: Optional[str] = None
    seed: int = 0

    def to_wire(self) -> dict:
        return {"op": "fit", "data_path": self.data_path, "target": self.target,
                "time_budget_s": self.time_budget_s, "eval_budget": self.eval_budget,
                "restrict_family": self.restrict_family, "seed": self.seed}


# ------------------------------------------------------------------ adapters

class BuiltinToyAdapter:
    """In-process adapter over the toy AutoML backend."""

    name = "builtin-toy"

    def fit(self, request: FitRequest) -> dict:
        return toy_automl.fit(
            request.data_path, request.target,
            time_budget_s=request.time_budget_s, eval_budget=request.eval_budget,
            restrict_family=request.restrict_family, seed=request.seed)

    def score(self, data_path: str, target: str, *, model_family: str,
              config_blob: str, seed: int = 0) -> dict:
        return toy_automl.score(data_path, target, model_family=model_family,
                                config_blob=config_blob, seed=seed)

    def close(self) -> None:
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class SubprocessAdapter:
    """Client for an external adapter process speaking the JSON-lines
    protocol over stdin/stdout. Requests are supervised: an unresponsive
    process is killed after the budget plus 20% grace."""

    EVAL_MODE_TIMEOUT_S = 900.0

    def __init__(self, command, *, grace_factor: float = 1.2,
                 grace_floor_s: float = 30.0):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.name = " ".join(self.command)
        self.grace_factor = grace_factor
        self.grace_floor_s = grace_floor_s
        try:
            self.proc = subprocess.Popen(
                self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                text=True, bufsize=1)
        except OSError as exc:
            raise AdapterUnavailableError(f"cannot spawn adapter: {exc}") from exc
        self._lines: queue.Queue[Optional[str]] = queue.Queue()
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()

    def _pump(self):
        for line in self.proc.stdout:
            self._lines.put(line)
        self._lines.put(None)  # EOF marker

    def _request(self, obj: dict, timeout_s: float) -> dict:
        if self.proc.poll() is not None:
            raise AdapterUnavailableError("adapter process has exited")
        try:
            self.proc.stdin.write(json.dumps(obj) + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise AdapterUnavailableError(f"adapter pipe closed: {exc}") from exc
        try:
            line = self._lines.get(timeout=timeout_s)
        except queue.Empty:
            self.proc.kill()
            raise AdapterTimeoutError(
                f"no response within {timeout_s:.1f}s (budget + grace)") from None
        if line is None:
            raise AdapterUnavailableError("adapter closed its output stream")
        try:
            resp = json.loads(line)
        except json.JSONDecodeError as exc:
            raise AdapterProtocolError(f"unparseable response line: {line!r}") from exc
        if not isinstance(resp, dict) or "ok" not in resp:
            raise AdapterProtocolError(f"malformed response: {resp!r}")
        if not resp["ok"]:
            raise AdapterProtocolError(f"adapter error: {resp.get('error')}")
        return resp

    def _fit_timeout(self, request: FitRequest) -> float:
        if request.eval_budget is not None:
            return self.EVAL_MODE_TIMEOUT_S
        return request.time_budget_s * self.grace_factor + self.grace_floor_s

    def fit(self, request: FitRequest) -> dict:
        resp = self._request(request.to_wire(), self._fit_timeout(request))
        missing = {"model_family", "config_blob", "accuracy", "wall_time_s"} - resp.keys()
        if missing:
            raise AdapterProtocolError(f"fit response missing fields: {sorted(missing)}")
        return resp

    def score(self, data_path: str, target: str, *, model_family: str,
              config_blob: str, seed: int = 0) -> dict:
        resp = self._request(
            {"op": "score", "data_path": data_path, "target": target,
             "model_family": model_family, "config_blob": config_blob, "seed": seed},
            self.EVAL_MODE_TIMEOUT_S)
        if "accuracy" not in resp:
            raise AdapterProtocolError("score response missing accuracy")
        return resp

    def close(self) -> None:
        if self.proc.poll() is None:
            try:
                self._request({"op": "shutdown"}, timeout_s=10.0)
            except Exception:
                pass
            try:
                self.proc.wait(timeout=5.0)
            except subprocess.TimeoutExpired:
                self.proc.kill()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def resolve_adapter(spec: Optional[str]):
    """Adapter factory: "builtin-toy", or a command line to spawn. The
    SUBSTRAT_ADAPTER environment variable overrides the argument."""
    spec = os.environ.get("SUBSTRAT_ADAPTER") or spec or "builtin-toy"
    if spec == "builtin-toy":
        return BuiltinToyAdapter()
    return SubprocessAdapter(spec)


# ------------------------------------------------------------------ pipeline

@dataclass
class PipelineReport:
    """Full record of one subset-accelerated AutoML run."""

    dataset_name: str
    target: str
    strategy: str
    seed: int
    subset: SubsetIndices
    search: SearchResult
    intermediate: ModelConfig
    final: ModelConfig
    fine_tune: bool
    full: Optional[ModelConfig] = None
    time_budget_s: Optional[float] = None
    eval_budget: Optional[int] = None
    fine_tune_frac: float = 0.25
    time_reduction: Optional[float] = None
    relative_accuracy: Optional[float] = None
    request_log: list[dict] = field(default_factory=list)

    @property
    def time_m_sub_s(self) -> float:
        """Total cost of the subset route: search + subset fit + fine-tune."""
        return (self.search.wall_time_s + self.intermediate.wall_time_s
                + self.final.wall_time_s)

    def to_dict(self, deterministic: bool = False) -> dict:
        return {
            "dataset": self.dataset_name,
            "target": self.target,
            "strategy": self.strategy,
            "seed": self.seed,
            "subset": {"rows": list(self.subset.rows), "cols": list(self.subset.cols),
                       "n": self.subset.n, "m": self.subset.m},
            "search": self.search.to_dict(deterministic),
            "fine_tune": self.fine_tune,
            "budgets": {"time_budget_s": None if deterministic else self.time_budget_s,
                        "eval_budget": self.eval_budget,
                        "fine_tune_frac": self.fine_tune_frac},
            "intermediate": self.intermediate.to_dict(deterministic),
            "final": self.final.to_dict(deterministic),
            "full": self.full.to_dict(deterministic) if self.full else None,
            "time_m_sub_s": None if deterministic else self.time_m_sub_s,
            "time_reduction": None if deterministic else self.time_reduction,
            "relative_accuracy": self.relative_accuracy,
            "request_log": self.request_log,
        }

    def to_json(self, deterministic: bool = False) -> str:
        return json.dumps(self.to_dict(deterministic), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineReport":
        from substrat.gendst import GenerationStats

        s = d["search"]
        search = SearchResult(
            best=SubsetIndices(tuple(s["rows"]), tuple(s["cols"])),
            best_loss=s["loss"], generations_run=s["generations"],
            evaluations=s["evaluations"],
            trace=[GenerationStats(**t) for t in s.get("trace", [])],
            wall_time_s=s["wall_time_s"] if s["wall_time_s"] is not None else 0.0,
            strategy=s["strategy"])
        budgets = d.get("budgets", {})
        return cls(
            dataset_name=d["dataset"], target=d["target"], strategy=d["strategy"],
            seed=d["seed"],
            subset=SubsetIndices(tuple(d["subset"]["rows"]), tuple(d["subset"]["cols"])),
            search=search,
            intermediate=ModelConfig.from_dict(d["intermediate"]),
            final=ModelConfig.from_dict(d["final"]),
            fine_tune=d["fine_tune"],
            full=ModelConfig.from_dict(d["full"]) if d.get("full") else None,
            time_budget_s=budgets.get("time_budget_s"),
            eval_budget=budgets.get("eval_budget"),
            fine_tune_frac=budgets.get("fine_tune_frac", 0.25),
            time_reduction=d.get("time_reduction"),
            relative_accuracy=d.get("relative_accuracy"),
            request_log=list(d.get("request_log", [])))


def compute_metrics(full: ModelConfig, sub_total_time: float,
                    sub_accuracy: float) -> tuple[float, float]:
    """(time_reduction, relative_accuracy) against the full-AutoML baseline.

    time_reduction = 1 - Time_sub/Time_full; relative_accuracy =
    Acc_sub/Acc_full. Degenerate baselines (zero time or accuracy) yield nan
    for the affected metric rather than raising.
    """
    time_reduction = (1.0 - sub_total_time / full.wall_time_s
                      if full.wall_time_s > 0 else math.nan)
    relative_accuracy = (sub_accuracy / full.accuracy
                         if full.accuracy > 0 else math.nan)
    return time_reduction, relative_accuracy


def _timed_fit(adapter, request: FitRequest, log: list[dict], role: str) -> ModelConfig:
    log.append({"op": "fit", "data": role, "restrict_family": request.restrict_family,
                "time_budget_s": request.time_budget_s,
                "eval_budget": request.eval_budget, "seed": request.seed})
    start = time.perf_counter()
    resp = adapter.fit(request)
    elapsed = time.perf_counter() - start
    return ModelConfig(model_family=resp["model_family"],
                       config_blob=resp["config_blob"],
                       accuracy=resp["accuracy"], wall_time_s=elapsed,
                       evals=int(resp.get("evals") or 0))


def run_full_automl(dataset: Dataset, adapter, *, time_budget_s: float = 60.0,
                    eval_budget: Optional[int] = None, seed: int = 0,
                    request_log: Optional[list[dict]] = None) -> ModelConfig:
    """The Full-AutoML baseline: one unrestricted fit on the whole dataset."""
    log = request_log if request_log is not None else []
    target = dataset.column_names[dataset.target_col]
    with tempfile.TemporaryDirectory(prefix="substrat-full-") as tmp:
        path = os.path.join(tmp, "full.csv")
        view(dataset, dataset.full_indices()).to_csv(path)
        req = FitRequest(data_path=path, target=target, time_budget_s=time_budget_s,
                         eval_budget=eval_budget, restrict_family=None, seed=seed)
        return _timed_fit(adapter, req, log, "full")


def _find_subset(dataset: Dataset, strategy: str, measure: MeasureLike, *,
                 n: Optional[int], m: Optional[int], seed: int,
                 ga_params: Optional[GaParams],
                 baseline_opts: Optional[dict]) -> SearchResult:
    if strategy == "gendst":
        params = replace(ga_params) if ga_params is not None else GaParams()
        params.seed = seed
        if n is not None:
            params.subset_rows = n
        if m is not None:
            params.subset_cols = m
        return run_gendst(dataset, measure, params)
    dn, dm = default_subset_size(dataset.n_rows, dataset.n_cols)
    opts = dict(baseline_opts or {})
    opts.setdefault("n", n if n is not None else dn)
    opts.setdefault("m", m if m is not None else dm)
    return run_baseline(strategy, dataset, measure,
                        rng=np.random.default_rng(seed), **opts)


def run_pipeline(dataset: Dataset, adapter, *, strategy: str = "gendst",
                 measure: MeasureLike = "entropy",
                 n: Optional[int] = None, m: Optional[int] = None,
                 time_budget_s: float = 60.0, eval_budget: Optional[int] = None,
                 fine_tune: bool = True, fine_tune_frac: float = 0.25,
                 ga_params: Optional[GaParams] = None,
                 baseline_opts: Optional[dict] = None, seed: int = 0,
                 full: Optional[ModelConfig] = None) -> PipelineReport:
    """Run the three-step workflow and assemble the report.

    When `full` (the Full-AutoML baseline) is given, time-reduction and
    relative-accuracy are filled in. fine_tune=False is the no-fine-tune
    variant: the intermediate model is re-scored on the full data's holdout
    instead of being refit.
    """
    if time_budget_s <= 0 or fine_tune_frac <= 0:
        raise ValueError("budgets must be positive")
    if eval_budget is not None and eval_budget < 1:
        raise ValueError("eval_budget must be positive")
    target = dataset.column_names[dataset.target_col]
    log: list[dict] = []

    search = _find_subset(dataset, strategy, measure, n=n, m=m, seed=seed,
                          ga_params=ga_params, baseline_opts=baseline_opts)

    with tempfile.TemporaryDirectory(prefix="substrat-run-") as tmp:
        subset_path = os.path.join(tmp, "subset.csv")
        view(dataset, search.best).to_csv(subset_path)
        intermediate = _timed_fit(adapter, FitRequest(
            data_path=subset_path, target=target, time_budget_s=time_budget_s,
            eval_budget=eval_budget, restrict_family=None, seed=seed), log, "subset")

        full_path = os.path.join(tmp, "full.csv")
        view(dataset, dataset.full_indices()).to_csv(full_path)
        if fine_tune:
            ft_evals = (max(1, int(eval_budget * fine_tune_frac + 0.5))
                        if eval_budget is not None else None)
            final = _timed_fit(adapter, FitRequest(
                data_path=full_path, target=target,
                time_budget_s=time_budget_s * fine_tune_frac, eval_budget=ft_evals,
                restrict_family=intermediate.model_family, seed=seed), log, "full")
        else:
            log.append({"op": "score", "data": "full",
                        "restrict_family": None, "seed": seed})
            start = time.perf_counter()
            resp = adapter.score(full_path, target,
                                 model_family=intermediate.model_family,
                                 config_blob=intermediate.config_blob, seed=seed)
            final = ModelConfig(model_family=intermediate.model_family,
                                config_blob=intermediate.config_blob,
                                accuracy=resp["accuracy"],
                                wall_time_s=time.perf_counter() - start)

    report = PipelineReport(
        dataset_name=dataset.name, target=target, strategy=strategy, seed=seed,
        subset=search.best, search=search, intermediate=intermediate, final=final,
        fine_tune=fine_tune, full=full, time_budget_s=time_budget_s,
        eval_budget=eval_budget, fine_tune_frac=fine_tune_frac, request_log=log)
    if full is not None:
        report.time_reduction, report.relative_accuracy = compute_metrics(
            full, report.time_m_sub_s, final.accuracy)
    return report
