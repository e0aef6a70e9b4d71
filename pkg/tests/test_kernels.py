"""Both kernel backends must agree with each other and with a hash-map
recount on arbitrary views."""
import numpy as np
import pytest

from substrat._kernels import BACKEND, entropy_py
from substrat.dataset import random_subset
from synth import synth_dataset

try:
    from substrat._kernels import entropy_fast
except ImportError:
    entropy_fast = None

needs_ext = pytest.mark.skipif(entropy_fast is None,
                               reason="compiled kernel not built")


@needs_ext
def test_backends_agree(tmp_path):
    ds = synth_dataset(60, 8, seed=5, tmp_path=tmp_path)
    rng = np.random.default_rng(1)
    for _ in range(200):
        n = int(rng.integers(1, 61))
        m = int(rng.integers(2, 9))
        s = random_subset(ds, n, m, rng)
        rows, cols = s.row_array(), s.col_array()
        fast = entropy_fast.mean_entropy(ds.matrix, ds.dict_sizes, rows, cols)
        slow = entropy_py.mean_entropy(ds.matrix, ds.dict_sizes, rows, cols)
        assert fast == pytest.approx(slow, abs=1e-12)


@needs_ext
def test_full_rows_none(tmp_path):
    ds = synth_dataset(40, 5, seed=9, tmp_path=tmp_path)
    cols = np.arange(5, dtype=np.int64)
    fast = entropy_fast.mean_entropy(ds.matrix, ds.dict_sizes, None, cols)
    slow = entropy_py.mean_entropy(ds.matrix, ds.dict_sizes, None, cols)
    assert fast == pytest.approx(slow, abs=1e-12)


def test_active_backend_reported():
    assert BACKEND in ("compiled", "python")


def test_fallback_env_override():
    import os
    import subprocess
    import sys

    env = dict(os.environ, SUBSTRAT_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from substrat._kernels import BACKEND; print(BACKEND)"],
        env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"
