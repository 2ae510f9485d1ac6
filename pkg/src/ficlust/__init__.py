"""Feature-incremental clustering toolkit.

k-means style clustering for data whose feature space grows between
collection stages, plus the evaluation harness (metrics, splits, synthetic
benchmarks, and a config-driven experiment runner).
"""

from .core import (
    CentersModel,
    as_matrix,
    empirical_risk,
    max_row_norm,
    nearest_center,
    squared_distance,
)
from .data import (
    NormalizeParams,
    SplitSpec,
    SynthSpec,
    generate_synthetic,
    load_dataset,
    normalize,
    normalize_bundle,
    save_dataset,
    split_stages,
)
from .diagnostics import (
    DiscrepancyEstimate,
    WeightVector,
    adaptation_risk,
    discrepancy_candidates,
    estimate_discrepancy,
    weighted_risk,
)
from .errors import (
    ColumnMismatchError,
    ConfigError,
    DataError,
    DegenerateClusterError,
    DimensionError,
    EmptyInputError,
    FicError,
    InsufficientDataError,
    MissingFileError,
    NonFiniteValueError,
    ParseError,
)
from .experiment import (
    ALGORITHMS,
    DEFAULT_RA_GRID,
    DEFAULT_RUNS,
    DEFAULT_THETA_GRID,
    CellReport,
    ExperimentConfig,
    MetricsReport,
    emit_report,
    fit_baseline_c1,
    fit_baseline_p1,
    pretrain_previous,
    render_mean_std,
    run_experiment,
)
from .incremental import (
    MrOptions,
    StageBundle,
    fit_da,
    fit_dr,
    fit_ft,
    fit_mr,
    reconstruct_missing,
    update_new_block,
    update_old_block,
)
from .kmeans import FitOptions, FitReport, init_centers, lloyd_fit, predict
from .metrics import accuracy, nmi, optimal_matching, pairwise_fscore
from .model_io import load_model, save_model

__version__ = "0.1.0"
