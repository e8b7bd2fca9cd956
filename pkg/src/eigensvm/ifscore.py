"""Intuitionistic fuzzy membership, non-membership, and score weights.

Each training sample gets a triple ``(mu, nu, s)``:

* ``mu`` falls off linearly with the sample's feature-space distance to its
  own class center, relative to the class radius plus a slack ``gamma``;
* ``nu`` scales ``1 - mu`` by the fraction of opposite-label samples in the
  sample's ``beta``-neighborhood (the sample itself counts, so the
  denominator is never zero);
* ``s`` combines the two: ``mu`` when ``nu == 0``, zero when ``mu <= nu``,
  otherwise ``(1 - nu) / (2 - mu - nu)``.

All geometry lives in the kernel-induced feature space, so the same code
serves linear and Gaussian classifiers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainViolation, EmptyClass, ZeroDenominator
from .kernels import GAUSSIAN, KernelSpec

BETA_AUTO = "auto"


@dataclass(frozen=True)
class IfParams:
    """Scoring configuration.

    ``gamma`` is the radius slack keeping memberships positive; ``beta`` is
    the neighborhood radius, either explicit or ``"auto"`` (median of all
    pairwise feature-space distances in the training set); ``score_kernel``
    is the kernel the scores are computed in, ``None`` meaning "inherit the
    classifier's kernel, falling back to Gaussian(sigma=1) for linear
    classifiers".
    """

    gamma: float = 1e-4
    beta: float | str = BETA_AUTO
    score_kernel: KernelSpec | None = None

    def __post_init__(self):
        if self.gamma < 0:
            raise DomainViolation(f"gamma must be nonnegative, got {self.gamma}")
        if self.beta != BETA_AUTO and not float(self.beta) > 0:
            raise DomainViolation(f"explicit beta must be positive, got {self.beta}")


@dataclass(frozen=True)
class IfScores:
    """Per-sample (mu, nu, s) triples in dataset row order, plus class radii."""

    mu: np.ndarray
    nu: np.ndarray
    s: np.ndarray
    class_radii: tuple[float, float]


def _score_kernel(params: IfParams) -> KernelSpec:
    if params.score_kernel is not None:
        return params.score_kernel
    return KernelSpec(GAUSSIAN, 1.0)


def resolve_beta(features: np.ndarray, params: IfParams) -> float:
    """Resolve the neighborhood radius; ``auto`` is the median pairwise distance."""
    if params.beta != BETA_AUTO:
        return float(params.beta)
    dists = kernels.pairwise_feature_distances(features, _score_kernel(params))
    iu = np.triu_indices(dists.shape[0], k=1)
    if iu[0].size == 0:
        return 0.0
    return float(np.median(dists[iu]))


def membership(features: np.ndarray, labels: np.ndarray, params: IfParams):
    """Membership degree of every sample w.r.t. its own class.

    Returns ``(mu, (r_pos, r_neg))`` where the radii are the largest
    feature-space distances from a class member to its class center.
    """
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels)
    spec = _score_kernel(params)
    mu = np.empty(labels.shape[0])
    radii = {}
    for cls in (+1, -1):
        mask = labels == cls
        if not mask.any():
            raise EmptyClass(f"class {cls:+d} has no samples")
        members = features[mask]
        center_sq = kernels.class_center_sq(members, spec)
        d = kernels.distances_to_center(members, members, spec, center_sq)
        r = float(d.max())
        radii[cls] = r
        denom = r + params.gamma
        if denom == 0.0:
            raise ZeroDenominator(
                f"class {cls:+d} radius + gamma is zero (identical samples, gamma=0)"
            )
        mu[mask] = np.clip(1.0 - d / denom, 0.0, 1.0)
    return mu, (radii[+1], radii[-1])


def nonmembership(
    features: np.ndarray, labels: np.ndarray, mu: np.ndarray, params: IfParams
) -> np.ndarray:
    """Non-membership ``nu = (1 - mu) * eta``.

    ``eta`` is the fraction of opposite-label samples among all training
    samples (self included) within feature-space distance ``beta``.
    """
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels)
    beta = resolve_beta(features, params)
    dists = kernels.pairwise_feature_distances(features, _score_kernel(params))
    within = dists <= beta
    hetero = labels[None, :] != labels[:, None]
    eta = (within & hetero).sum(axis=1) / within.sum(axis=1)
    return (1.0 - mu) * eta


def score(mu: np.ndarray, nu: np.ndarray) -> np.ndarray:
    """Amalgamate membership and non-membership into weights in [0, 1]."""
    mu = np.asarray(mu, dtype=float)
    nu = np.asarray(nu, dtype=float)
    tol = 1e-12
    if np.any(mu < -tol) or np.any(mu > 1 + tol):
        raise DomainViolation("mu outside [0, 1]")
    if np.any(nu < -tol) or np.any(nu - (1.0 - mu) > tol):
        raise DomainViolation("nu outside [0, 1 - mu]")
    s = np.where(mu <= nu, 0.0, (1.0 - nu) / (2.0 - mu - nu))
    s = np.where(nu == 0.0, mu, s)
    return s


def compute_scores(features: np.ndarray, labels: np.ndarray, params: IfParams) -> IfScores:
    """Full (mu, nu, s) triples for a training set, in dataset row order."""
    mu, radii = membership(features, labels, params)
    nu = nonmembership(features, labels, mu, params)
    return IfScores(mu=mu, nu=nu, s=score(mu, nu), class_radii=radii)


def score_matrices(features: np.ndarray, labels: np.ndarray, params: IfParams):
    """Diagonals of the per-class score matrices.

    Returns ``(s1, s2)``: the scores of +1-class samples in their row order
    within the class, and likewise for the -1 class.
    """
    labels = np.asarray(labels)
    scores = compute_scores(features, labels, params)
    return scores.s[labels == +1], scores.s[labels == -1]
