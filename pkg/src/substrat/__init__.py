"""Measure-preserving data subsets for faster AutoML.

Find a small subset of a tabular dataset whose dataset-entropy matches the
full data, run an AutoML backend on the subset, then fine-tune the winning
configuration on the full data restricted to its model family.
"""
from substrat._kernels import BACKEND as kernel_backend
from substrat.baselines import (
    greedy_mult,
    greedy_seq,
    ig_km,
    ig_rand,
    ig_rank,
    km_select,
    mab_search,
    mc_search,
    run_baseline,
)
from substrat.dataset import (
    Dataset,
    DatasetView,
    SubsetIndices,
    default_subset_size,
    load_csv,
    random_subset,
    view,
)
from substrat.gendst import (
    GaParams,
    SearchResult,
    brute_force_dst,
    crossover,
    mutate,
    run_gendst,
    select,
)
from substrat.measures import (
    dataset_entropy,
    fitness,
    full_measure,
    get_measure,
    loss,
    register_measure,
)
from substrat.pipeline import (
    BuiltinToyAdapter,
    FitRequest,
    ModelConfig,
    PipelineReport,
    SubprocessAdapter,
    compute_metrics,
    resolve_adapter,
    run_full_automl,
    run_pipeline,
)

__version__ = "0.1.0"
