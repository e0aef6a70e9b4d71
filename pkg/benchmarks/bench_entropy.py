#!/usr/bin/env python3
"""Compare the compiled entropy kernel against the pure-numpy fallback.

Times single-evaluation latency across view sizes, a Monte-Carlo-style batch
(the 100K-draw workload), and a full genetic search with each backend.

    python benchmarks/bench_entropy.py [--rows 1000] [--cols 12]
"""
import argparse
import os
import sys
import time

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "tests"))

from synth import synth_dataset

from substrat._kernels import entropy_py
from substrat.dataset import default_subset_size, draw_indices

try:
    from substrat._kernels import entropy_fast
except ImportError:
    entropy_fast = None


def time_single(kernel, ds, n, m, repeats=3000):
    rng = np.random.default_rng(0)
    draws = [draw_indices(rng, ds.n_rows, ds.n_cols, n, m, ds.target_col)
             for _ in range(256)]
    start = time.perf_counter()
    acc = 0.0
    for i in range(repeats):
        rows, cols = draws[i % 256]
        acc += kernel.mean_entropy(ds.matrix, ds.dict_sizes, rows, cols)
    elapsed = time.perf_counter() - start
    return elapsed / repeats, acc


def time_mc_batch(kernel, ds, n, m, iterations=100_000):
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    best = np.inf
    for _ in range(iterations):
        rows, cols = draw_indices(rng, ds.n_rows, ds.n_cols, n, m, ds.target_col)
        v = kernel.mean_entropy(ds.matrix, ds.dict_sizes, rows, cols)
        best = min(best, v)
    return time.perf_counter() - start


def time_ga(backend_env, data_args):
    """Run the GA in a subprocess so the kernel choice is made at import."""
    import subprocess

    code = (
        "import sys; sys.path.insert(0, 'tests')\n"
        "from synth import synth_dataset\n"
        "import time\n"
        "from substrat.gendst import GaParams, run_gendst\n"
        "from substrat import kernel_backend\n"
        f"ds = synth_dataset({data_args})\n"
        "t0 = time.perf_counter()\n"
        "res = run_gendst(ds, 'entropy', GaParams(seed=0))\n"
        "print(f'{kernel_backend} {time.perf_counter()-t0:.3f} {res.best_loss:.6f}')\n"
    )
    env = dict(os.environ, **backend_env)
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True,
                         cwd=os.path.join(os.path.dirname(__file__), os.pardir))
    return out.stdout.strip() or out.stderr.strip()


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--rows", type=int, default=1000)
    parser.add_argument("--cols", type=int, default=12)
    parser.add_argument("--mc-iterations", type=int, default=100_000)
    args = parser.parse_args()

    ds = synth_dataset(args.rows, args.cols, seed=42)
    n, m = default_subset_size(ds.n_rows, ds.n_cols)
    print(f"dataset {ds.n_rows}x{ds.n_cols}, subset {n}x{m}")

    backends = [("python ", entropy_py)]
    if entropy_fast is not None:
        backends.insert(0, ("compiled", entropy_fast))
    else:
        print("compiled kernel not built; showing fallback only")

    print("\nper-evaluation latency")
    baseline = None
    for name, kernel in backends:
        per_eval, _ = time_single(kernel, ds, n, m)
        ratio = "" if baseline is None else f"  ({per_eval / baseline:.1f}x slower)"
        baseline = baseline if baseline is not None else per_eval
        print(f"  {name}: {per_eval * 1e6:8.2f} us{ratio}")

    print(f"\nMC batch, {args.mc_iterations} draws")
    baseline = None
    for name, kernel in backends:
        elapsed = time_mc_batch(kernel, ds, n, m, args.mc_iterations)
        ratio = "" if baseline is None else f"  ({elapsed / baseline:.1f}x slower)"
        baseline = baseline if baseline is not None else elapsed
        print(f"  {name}: {elapsed:8.2f} s {ratio}")

    print("\ngenetic search, default parameters (backend wall loss)")
    data_args = f"{args.rows}, {args.cols}, seed=42"
    print(" ", time_ga({}, data_args))
    print(" ", time_ga({"SUBSTRAT_PURE_PYTHON": "1"}, data_args))


if __name__ == "__main__":
    main()
