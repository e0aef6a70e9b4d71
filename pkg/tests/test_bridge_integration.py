"""Optional integration: the pipeline driving the sklearn bridge as an
external adapter process. Skips when the bridge package is not installed;
no primary functionality depends on it."""
import sys

import pytest

pytest.importorskip("substrat_bridge")
pytest.importorskip("sklearn")

from substrat.gendst import GaParams
from substrat.pipeline import SubprocessAdapter, run_full_automl, run_pipeline
from synth import synth_dataset

BRIDGE = [sys.executable, "-m", "substrat_bridge"]


def test_pipeline_through_bridge(tmp_path):
    ds = synth_dataset(250, 7, seed=33, tmp_path=tmp_path, signal=0.45)
    with SubprocessAdapter(BRIDGE) as adapter:
        full = run_full_automl(ds, adapter, eval_budget=6, seed=1)
        report = run_pipeline(ds, adapter, eval_budget=6, seed=1, full=full,
                              ga_params=GaParams(generations=6, population=16))
    assert report.final.model_family == report.intermediate.model_family
    assert 0.0 <= report.final.accuracy <= 1.0
    assert report.relative_accuracy is not None


def test_nf_mode_through_bridge(tmp_path):
    ds = synth_dataset(250, 7, seed=34, tmp_path=tmp_path, signal=0.45)
    with SubprocessAdapter(BRIDGE) as adapter:
        report = run_pipeline(ds, adapter, eval_budget=6, seed=2,
                              fine_tune=False,
                              ga_params=GaParams(generations=6, population=16))
    assert report.fine_tune is False
    assert report.final.config_blob == report.intermediate.config_blob
