"""Matrix completion with column-side covariates.

Library layout: `data` (containers, seeding, mask splitting), `synth`
(instance generation), `kernel` (windowed-mean row fits and regression
baselines), `distance` (debiased pairwise row distances), `neighbors`
(nearest-neighbor completion and parameter recipes), `baselines` (ALS and
soft impute), `harness` (tuning, sweeps, CSV emission), `dataio` (dataset
interchange), `cli` (command line).
"""

from .baselines import ALSConfig, SoftImputeConfig, als_fit, softimpute_fit, softimpute_path
from .data import (
    ConfigError,
    CovariateSet,
    DataIOError,
    DenseEstimate,
    GroundTruthInstance,
    ObservationMask,
    ObservedDataset,
    SeedSpec,
    split_mask,
)
from .distance import (
    RowDistanceMatrix,
    estimate_distances,
    noise_bias_correction,
    oracle_smoothed_distance_sq,
    oracle_smoothed_fit,
    true_distance_sq,
)
from .harness import (
    ExperimentResult,
    GridSpec,
    METHODS,
    TrialRecord,
    fit_predict,
    mse,
    sweep_n,
    sweep_p,
    tune,
)
from .kernel import (
    RowRegressionFit,
    fit_rows,
    oracle_regression,
    rect_kernel,
    row_regression_baseline,
)
from .neighbors import (
    NeighborhoodSpec,
    TheoryParams,
    build_col_neighborhood,
    build_row_neighborhood,
    full_pipeline,
    nn_predict,
    theory_params,
)
from .synth import LATENT_FUNCTION_IDS, SynthConfig, generate, latent_f

__all__ = [
    "ALSConfig",
    "ConfigError",
    "CovariateSet",
    "DataIOError",
    "DenseEstimate",
    "ExperimentResult",
    "GridSpec",
    "GroundTruthInstance",
    "LATENT_FUNCTION_IDS",
    "METHODS",
    "NeighborhoodSpec",
    "ObservationMask",
    "ObservedDataset",
    "RowDistanceMatrix",
    "RowRegressionFit",
    "SeedSpec",
    "SoftImputeConfig",
    "SynthConfig",
    "TheoryParams",
    "TrialRecord",
    "als_fit",
    "build_col_neighborhood",
    "build_row_neighborhood",
    "estimate_distances",
    "fit_predict",
    "fit_rows",
    "full_pipeline",
    "generate",
    "latent_f",
    "mse",
    "nn_predict",
    "noise_bias_correction",
    "oracle_regression",
    "oracle_smoothed_distance_sq",
    "oracle_smoothed_fit",
    "rect_kernel",
    "row_regression_baseline",
    "softimpute_fit",
    "softimpute_path",
    "split_mask",
    "sweep_n",
    "sweep_p",
    "theory_params",
    "true_distance_sq",
    "tune",
]
