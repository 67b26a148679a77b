"""Big-data minimum-sum-of-squares clustering.

K-means with greedy K-means++ seeding, sequential Big-means over uniform
random samples, and a competitive parallel Big-means that optimizes the
sample size across workers. Hot kernels run on numba by default with a pure
numpy fallback (see samplemeans.backend).
"""

from . import backend
from .core import (
    CentroidSet,
    as_points,
    assign_all,
    evaluate_objective,
    nearest_centroid,
    squared_euclidean,
)
from .kmeans import (
    LloydConfig,
    LloydResult,
    fit_kmeans,
    kmeanspp_init,
    kmeanspp_reseed,
    lloyd,
)
from .bigmeans import Incumbent, StopCondition, big_means, big_means_step, sample_rows
from .competitive import (
    CompetitiveConfig,
    CompetitiveResult,
    ImprovementLog,
    WorkerState,
    derive_rng,
    draw_sample_size,
    final_evaluation,
    recalibrate,
    run_competitive,
    run_worker_epoch,
    select_s_opt,
    shared_rng,
    worker_rng,
)
from .ingest import IngestError, IngestSpec, load, minmax_scale, synth_blobs
from .metrics import (
    AlgoStats,
    BenchReport,
    RunTrace,
    baseline_time,
    compute_baseline,
    multi_worker_baseline_time,
    relative_accuracy,
    success_counts,
    summarize,
)

__version__ = "0.1.0"

__all__ = [
    "backend",
    "CentroidSet",
    "as_points",
    "assign_all",
    "evaluate_objective",
    "nearest_centroid",
    "squared_euclidean",
    "LloydConfig",
    "LloydResult",
    "fit_kmeans",
    "kmeanspp_init",
    "kmeanspp_reseed",
    "lloyd",
    "Incumbent",
    "StopCondition",
    "big_means",
    "big_means_step",
    "sample_rows",
    "CompetitiveConfig",
    "CompetitiveResult",
    "ImprovementLog",
    "WorkerState",
    "derive_rng",
    "draw_sample_size",
    "final_evaluation",
    "recalibrate",
    "run_competitive",
    "run_worker_epoch",
    "select_s_opt",
    "shared_rng",
    "worker_rng",
    "IngestError",
    "IngestSpec",
    "load",
    "minmax_scale",
    "synth_blobs",
    "AlgoStats",
    "BenchReport",
    "RunTrace",
    "baseline_time",
    "compute_baseline",
    "multi_worker_baseline_time",
    "relative_accuracy",
    "success_counts",
    "summarize",
    "__version__",
]
