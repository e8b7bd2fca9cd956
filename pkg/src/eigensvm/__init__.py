"""Eigenvalue-based proximal SVM classifiers with fuzzy sample weighting.

Four binary classifiers built on nonparallel proximal hyperplanes:

* ``gepsvm``     generalized-eigenvalue formulation (Rayleigh-quotient ratio)
* ``igepsvm``    standard-eigenvalue formulation (weighted difference)
* ``if-gepsvm``  gepsvm with intuitionistic-fuzzy per-sample weights
* ``if-igepsvm`` igepsvm with intuitionistic-fuzzy per-sample weights

plus linear and Gaussian kernels, dataset tooling, cross-validated grid
search, and rank-based comparison statistics. The ``eigensvm`` console
script exposes the experiment pipeline.
"""

from .datakit import Dataset, SplitPlan, gen_crossplane, inject_label_noise, kfold_indices, load_csv, minmax_normalize, split
from .errors import EigensvmError
from .evalstats import (
    GridSpec,
    accuracy,
    average_ranks,
    evaluate_split,
    friedman,
    grid_search,
    nemenyi_cd,
    win_tie_loss,
)
from .ifscore import IfParams, compute_scores, score_matrices
from .kernels import KernelSpec, gram
from .models import (
    HyperParams,
    TrainedModel,
    Variant,
    fit,
    fit_gepsvm,
    fit_if_gepsvm,
    fit_if_igepsvm,
    fit_igepsvm,
    fit_kernel_variant,
    load_model,
    predict,
    save_model,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "EigensvmError",
    "GridSpec",
    "HyperParams",
    "IfParams",
    "KernelSpec",
    "SplitPlan",
    "TrainedModel",
    "Variant",
    "accuracy",
    "average_ranks",
    "compute_scores",
    "evaluate_split",
    "fit",
    "fit_gepsvm",
    "fit_if_gepsvm",
    "fit_if_igepsvm",
    "fit_igepsvm",
    "fit_kernel_variant",
    "friedman",
    "gen_crossplane",
    "gram",
    "grid_search",
    "inject_label_noise",
    "kfold_indices",
    "load_csv",
    "load_model",
    "minmax_normalize",
    "nemenyi_cd",
    "predict",
    "save_model",
    "score_matrices",
    "split",
    "win_tie_loss",
]
