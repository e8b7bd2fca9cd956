"""Cross-validated grid search and rank-based model comparison statistics.

The statistics follow the standard multi-dataset comparison recipe: average
ranks per dataset (1 = best, ties averaged), the Friedman chi-square and its
F-distributed refinement, the Nemenyi critical difference, and a pairwise
win-tie-loss sign test with ties split between the sides (an odd tie is
dropped).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from . import models
from .datakit import Dataset, kfold_indices
from .errors import (
    DegenerateInput,
    EigensvmError,
    EmptyInput,
    IncompleteTable,
    InvalidFraction,
    LengthMismatch,
)
from .ifscore import IfParams
from .kernels import GAUSSIAN, LINEAR, KernelSpec
from .models import HyperParams, Variant

DEFAULT_GRID = tuple(2.0**i for i in range(-8, 9))

# Nemenyi critical values at alpha = 0.05 (studentized range / sqrt(2))
# for q = 2..10 compared models.
NEMENYI_Q_ALPHA_05 = {
    2: 1.960,
    3: 2.343,
    4: 2.569,
    5: 2.728,
    6: 2.850,
    7: 2.949,
    8: 3.031,
    9: 3.102,
    10: 3.164,
}


@dataclass(frozen=True)
class GridSpec:
    """Hyperparameter grid and fold plan for cross-validated selection."""

    delta_grid: tuple = DEFAULT_GRID
    eta_grid: tuple = DEFAULT_GRID
    sigma_grid: tuple = DEFAULT_GRID
    folds: int = 10
    seed: int = 0

    def __post_init__(self):
        for name in ("delta_grid", "eta_grid", "sigma_grid"):
            grid = tuple(float(v) for v in getattr(self, name))
            if not grid:
                raise EmptyInput(f"{name} must not be empty")
            if any(v <= 0 for v in grid):
                raise InvalidFraction(f"{name} values must be positive")
            object.__setattr__(self, name, grid)
        if self.folds < 2:
            raise InvalidFraction(f"folds must be at least 2, got {self.folds}")


@dataclass
class EvalReport:
    """Everything a benchmark run produces, ready for CSV emission."""

    per_dataset_accuracy: dict = field(default_factory=dict)
    avg_ranks: dict = field(default_factory=dict)
    chi2_f: float = float("nan")
    f_f: float = float("nan")
    cd: float = float("nan")
    wtl: dict = field(default_factory=dict)


def accuracy(pred, truth) -> float:
    """Percentage of agreeing positions."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise LengthMismatch(f"predictions {pred.shape} vs truth {truth.shape}")
    if pred.size == 0:
        raise EmptyInput("accuracy of zero samples is undefined")
    return 100.0 * float(np.mean(pred == truth))


def _sigma_role(variant: Variant, kernel_kind: str) -> str:
    """What the sigma grid tunes: the classifier kernel, the score kernel,
    or nothing (plain linear models have no sigma)."""
    if kernel_kind == GAUSSIAN:
        return "kernel"
    return "score" if variant.is_fuzzy else "none"


def _hyperparams(
    variant: Variant, kernel_kind: str, delta: float, eta: float, sigma
) -> HyperParams:
    role = _sigma_role(variant, kernel_kind)
    kernel = KernelSpec(GAUSSIAN, sigma) if role == "kernel" else KernelSpec(LINEAR)
    if_params = None
    if variant.is_fuzzy:
        # under a Gaussian classifier kernel the score kernel inherits it
        if_params = (
            IfParams(score_kernel=KernelSpec(GAUSSIAN, sigma))
            if role == "score"
            else IfParams()
        )
    return HyperParams(delta=delta, eta=eta, kernel=kernel, if_params=if_params)


def grid_search(
    train: Dataset, variant: Variant, grid: GridSpec, kernel_kind: str = LINEAR
):
    """Pick hyperparameters by mean stratified k-fold accuracy.

    Sweeps only the dimensions the variant actually has: delta always, eta
    for the subtraction-form variants, sigma for Gaussian kernels (all
    variants) or the fuzzy score kernel (IF variants under a linear
    kernel). Returns ``(best HyperParams, cv_table)`` where the table holds
    one dict per grid point. Ties prefer smaller (delta, eta, sigma).

    Scores and moment matrices depend on sigma and the fold but not on
    (delta, eta), so they are built once per (sigma, fold) and reused.

    A grid point whose fit degenerates numerically (for instance a score
    sigma so extreme that every sample weight collapses to zero, leaving a
    zero moment matrix) is recorded with accuracy nan and never selected;
    the search only fails if every point does.
    """
    variant = Variant(variant)
    folds = kfold_indices(train.m, grid.folds, train.labels, grid.seed)
    all_idx = np.arange(train.m)
    fold_parts = []
    for val_idx in folds:
        tr_mask = np.ones(train.m, dtype=bool)
        tr_mask[val_idx] = False
        tr_idx = all_idx[tr_mask]
        X, y = train.features[tr_idx], train.labels[tr_idx]
        fold_parts.append(
            (X[y == +1], X[y == -1], train.features[val_idx], train.labels[val_idx])
        )

    role = _sigma_role(variant, kernel_kind)
    sigmas = list(grid.sigma_grid) if role != "none" else [None]
    etas = list(grid.eta_grid) if variant.uses_eta else [0.0]
    deltas = list(grid.delta_grid)

    table = []
    best = None  # ((-acc, delta, eta, sigma), hp)
    last_error = None
    for sigma in sigmas:
        prepared = []
        probe = _hyperparams(variant, kernel_kind, deltas[0], etas[0], sigma)
        try:
            for A, B, Xv, yv in fold_parts:
                if variant.is_fuzzy:
                    s1, s2 = models.training_scores(A, B, probe)
                else:
                    s1 = s2 = None
                if probe.kernel.kind == LINEAR:
                    reference = None
                    G, H = models.moment_matrices(A, B, s1, s2)
                else:
                    reference = np.vstack([A, B])
                    G, H = models.moment_matrices(A, B, s1, s2, kernel=probe.kernel)
                prepared.append((G, H, reference, Xv, yv))
        except EigensvmError as exc:
            last_error = exc
            prepared = None
        for delta in deltas:
            for eta in etas:
                hp = _hyperparams(variant, kernel_kind, delta, eta, sigma)
                mean_acc = float("nan")
                if prepared is not None:
                    try:
                        fold_accs = [
                            accuracy(
                                models.predict(
                                    models.fit_from_moments(variant, G, H, hp, ref), Xv
                                ),
                                yv,
                            )
                            for G, H, ref, Xv, yv in prepared
                        ]
                        mean_acc = float(np.mean(fold_accs))
                    except EigensvmError as exc:
                        last_error = exc
                table.append(
                    {
                        "delta": delta,
                        "eta": eta if variant.uses_eta else None,
                        "sigma": sigma,
                        "accuracy": mean_acc,
                    }
                )
                if np.isnan(mean_acc):
                    continue
                key = (-mean_acc, delta, eta, sigma if sigma is not None else 0.0)
                if best is None or key < best[0]:
                    best = (key, hp)
    if best is None:
        raise DegenerateInput(
            f"every grid point failed; last failure: {last_error}"
        )
    return best[1], table


def average_ranks(acc_table: dict) -> dict:
    """Mean rank per model over datasets; rank 1 is the highest accuracy.

    ``acc_table`` maps dataset name -> {model name -> accuracy}. Every
    dataset must cover the identical model set. Tied accuracies share the
    average of the ranks they span.
    """
    if not acc_table:
        raise EmptyInput("accuracy table has no datasets")
    datasets = list(acc_table)
    model_order = list(acc_table[datasets[0]])
    model_set = set(model_order)
    if len(model_order) < 2:
        raise IncompleteTable("need at least two models to rank")
    sums = np.zeros(len(model_order))
    for ds in datasets:
        row = acc_table[ds]
        if set(row) != model_set:
            raise IncompleteTable(
                f"dataset {ds!r} covers models {sorted(row)}, expected {sorted(model_set)}"
            )
        accs = np.array([float(row[mdl]) for mdl in model_order])
        sums += rankdata(-accs, method="average")
    return {mdl: float(s / len(datasets)) for mdl, s in zip(model_order, sums)}


def friedman(avg_ranks, N: int, q: int):
    """Friedman chi-square and its F-form from average ranks.

    chi2 = 12N/(q(q+1)) * (sum R_j^2 - q(q+1)^2/4)
    F    = (N-1) chi2 / (N(q-1) - chi2)
    """
    ranks = np.asarray(
        list(avg_ranks.values()) if isinstance(avg_ranks, dict) else avg_ranks,
        dtype=float,
    )
    if q < 2 or N < 2:
        raise DegenerateInput(f"need q >= 2 and N >= 2, got q={q}, N={N}")
    if ranks.shape != (q,):
        raise LengthMismatch(f"{ranks.shape[0]} ranks for q={q} models")
    chi2 = (12.0 * N / (q * (q + 1))) * (float(np.sum(ranks**2)) - q * (q + 1) ** 2 / 4.0)
    denom = N * (q - 1) - chi2
    if denom <= 0:
        raise DegenerateInput(
            f"F statistic undefined: N(q-1) - chi2 = {denom:.6g} is not positive"
        )
    f_f = (N - 1) * chi2 / denom
    return chi2, f_f


def nemenyi_cd(q: int, N: int, q_alpha: float) -> float:
    """Critical difference q_alpha * sqrt(q(q+1)/(6N))."""
    if q < 2 or N < 1:
        raise DegenerateInput(f"need q >= 2 and N >= 1, got q={q}, N={N}")
    if q_alpha < 0:
        raise DegenerateInput(f"q_alpha must be nonnegative, got {q_alpha}")
    return float(q_alpha * np.sqrt(q * (q + 1) / (6.0 * N)))


@dataclass(frozen=True)
class WtlResult:
    wins: int
    ties: int
    losses: int
    adjusted_wins: float
    threshold: float
    significant: bool


def win_tie_loss(acc_table: dict, model_a: str, model_b: str) -> WtlResult:
    """Sign test of model_a against model_b over the table's datasets.

    Ties are split evenly between the two sides before comparing against
    the threshold N/2 + 1.96*sqrt(N)/2; an odd tie is dropped first.
    Significance means the adjusted win count reaches the threshold.
    """
    if not acc_table:
        raise EmptyInput("accuracy table has no datasets")
    wins = ties = losses = 0
    for ds, row in acc_table.items():
        if model_a not in row or model_b not in row:
            raise IncompleteTable(f"dataset {ds!r} lacks {model_a!r} or {model_b!r}")
        a, b = float(row[model_a]), float(row[model_b])
        if a > b:
            wins += 1
        elif a < b:
            losses += 1
        else:
            ties += 1
    N = wins + ties + losses
    shared = (ties - (ties % 2)) / 2.0
    adjusted = wins + shared
    threshold = N / 2.0 + 1.96 * np.sqrt(N) / 2.0
    return WtlResult(
        wins=wins,
        ties=ties,
        losses=losses,
        adjusted_wins=float(adjusted),
        threshold=float(threshold),
        significant=bool(adjusted >= threshold),
    )


def evaluate_split(
    train: Dataset,
    test: Dataset,
    variant: Variant,
    grid: GridSpec,
    kernel_kind: str = LINEAR,
):
    """Grid-search on the training split, refit, score both splits.

    Returns ``(best_hp, cv_table, model, train_acc, test_acc)``; the refit
    uses the full training split and the selected hyperparameters.
    """
    variant = Variant(variant)
    best_hp, cv_table = grid_search(train, variant, grid, kernel_kind)
    A = train.features[train.labels == +1]
    B = train.features[train.labels == -1]
    model = models.fit(variant, A, B, best_hp)
    train_acc = accuracy(models.predict(model, train.features), train.labels)
    test_acc = accuracy(models.predict(model, test.features), test.labels)
    return best_hp, cv_table, model, train_acc, test_acc


__all__ = [
    "DEFAULT_GRID",
    "NEMENYI_Q_ALPHA_05",
    "GridSpec",
    "EvalReport",
    "WtlResult",
    "accuracy",
    "grid_search",
    "average_ranks",
    "friedman",
    "nemenyi_cd",
    "win_tie_loss",
    "evaluate_split",
]
