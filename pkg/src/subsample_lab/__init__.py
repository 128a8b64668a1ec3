"""Estimation errors of reference-labeling designs for categorical rasters.

The package simulates how a sampling unit's reference label depends on the
response design used to produce it: point designs estimate class proportions
from n random cells, partition designs aggregate a k-by-k grid of exact cell
proportions.  A sequential engine grows point samples until a confidence
interval settles the label, and an HTTP service exposes that loop to a human
interpreter.
"""

from .adaptive import (
    AdaptiveConfig,
    AdaptiveResult,
    OptimizationReport,
    StopDecision,
    StopStatus,
    adaptive_label,
    check_binary,
    check_majority,
    check_tallies,
    optimization_experiment,
)
from .designs import (
    DEFAULT_SHIFTS,
    PROTOCOLS,
    PartitionBased,
    PointBased,
    design_from_dict,
    design_to_dict,
    draw_point_order,
    partition_cells,
    sample_points,
    shifted_unit_sets,
    simulate_label,
)
from .harness import (
    ErrorReport,
    ExperimentConfig,
    ScalogramRow,
    build_raster,
    purity_scalogram,
    run_experiment,
    run_partition_experiment,
    run_point_experiment,
)
from .legends import (
    BinaryThreshold,
    Label,
    Legend,
    Majority,
    aggregate_majority_two_stage,
    aggregate_mtt,
    aggregate_ttm,
    decide,
    legend_from_dict,
    legend_to_dict,
)
from .metrics import BinnedCurve, bin_errors, erp, error_rate, local_regression_smooth, purity
from .raster import (
    CategoricalRaster,
    SamplingUnit,
    class_counts,
    extract_units,
    generate_patch_mosaic,
    generate_smoothed_binary,
    load_ascii_grid,
    save_ascii_grid,
    true_proportions,
)
from .report import write_optimization_report, write_report, write_scalogram
from .stats import (
    ConfidenceInterval,
    beta_quantile,
    chi_square_quantile,
    clopper_pearson,
    goodman_intervals,
    regularized_incomplete_beta,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptiveConfig",
    "AdaptiveResult",
    "BinaryThreshold",
    "BinnedCurve",
    "CategoricalRaster",
    "ConfidenceInterval",
    "DEFAULT_SHIFTS",
    "ErrorReport",
    "ExperimentConfig",
    "Label",
    "Legend",
    "Majority",
    "OptimizationReport",
    "PROTOCOLS",
    "PartitionBased",
    "PointBased",
    "SamplingUnit",
    "ScalogramRow",
    "StopDecision",
    "StopStatus",
    "adaptive_label",
    "aggregate_majority_two_stage",
    "aggregate_mtt",
    "aggregate_ttm",
    "beta_quantile",
    "bin_errors",
    "build_raster",
    "check_binary",
    "check_majority",
    "check_tallies",
    "chi_square_quantile",
    "class_counts",
    "clopper_pearson",
    "decide",
    "design_from_dict",
    "design_to_dict",
    "draw_point_order",
    "erp",
    "error_rate",
    "extract_units",
    "generate_patch_mosaic",
    "generate_smoothed_binary",
    "goodman_intervals",
    "legend_from_dict",
    "legend_to_dict",
    "load_ascii_grid",
    "local_regression_smooth",
    "optimization_experiment",
    "partition_cells",
    "purity",
    "purity_scalogram",
    "regularized_incomplete_beta",
    "run_experiment",
    "run_partition_experiment",
    "run_point_experiment",
    "sample_points",
    "save_ascii_grid",
    "shifted_unit_sets",
    "simulate_label",
    "true_proportions",
    "write_optimization_report",
    "write_report",
    "write_scalogram",
]
