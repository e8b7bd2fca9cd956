"""Kernel evaluation and implicit feature-space distances.

Distances between mapped samples never require the feature map itself:
for any kernel ``K`` the identities

* ``||psi(x)-psi(y)||^2   = K(x,x) - 2K(x,y) + K(y,y)``
* ``||psi(x)-center(A)||^2 = K(x,x) - (2/p)*sum_j K(x,a_j)
                              + (1/p^2)*sum_jl K(a_j,a_l)``

hold, with ``center(A)`` the mean of the ``p`` mapped class members. Both
squared forms can go slightly negative from Gram round-off; radicands down
to ``-1e-12`` are clamped to zero, anything worse raises
:class:`NegativeRadicand` because it signals a non-PSD kernel or corrupted
input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainViolation,
    EmptyClass,
    NegativeRadicand,
    NonFinite,
)

LINEAR = "linear"
GAUSSIAN = "gaussian"

RADICAND_CLAMP = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    """Kernel selection shared by scoring and classification.

    ``linear`` is the plain inner product; ``gaussian`` is
    ``exp(-||x-y||^2 / (2 sigma^2))`` with ``sigma > 0``.
    """

    kind: str = LINEAR
    sigma: float = 1.0

    def __post_init__(self):
        if self.kind not in (LINEAR, GAUSSIAN):
            raise DomainViolation(f"unknown kernel kind {self.kind!r}")
        if self.kind == GAUSSIAN and not self.sigma > 0:
            raise DomainViolation(f"gaussian kernel requires sigma > 0, got {self.sigma}")


def _as_rows(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    return X


def gram(X, Y, spec: KernelSpec) -> np.ndarray:
    """Kernel Gram matrix with entry ``(i, j) = K(X_i, Y_j)``.

    ``X`` and ``Y`` are sample-per-row matrices sharing a column count;
    1-D inputs are treated as single rows.
    """
    X, Y = _as_rows(X), _as_rows(Y)
    if X.shape[1] != Y.shape[1]:
        raise DimensionMismatch(
            f"feature counts differ: {X.shape[1]} vs {Y.shape[1]}"
        )
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
        raise NonFinite("kernel inputs contain NaN or Inf")
    if spec.kind == LINEAR:
        return X @ Y.T
    sq = (
        np.sum(X * X, axis=1)[:, None]
        - 2.0 * (X @ Y.T)
        + np.sum(Y * Y, axis=1)[None, :]
    )
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-sq / (2.0 * spec.sigma**2))


def _sqrt_clamped(sq: np.ndarray | float, context: str) -> np.ndarray | float:
    sq = np.asarray(sq, dtype=float)
    if np.any(sq < -RADICAND_CLAMP):
        raise NegativeRadicand(
            f"{context}: radicand {float(sq.min()):.3e} below -{RADICAND_CLAMP:.0e}"
        )
    return np.sqrt(np.maximum(sq, 0.0))


def feature_distance(x, y, spec: KernelSpec) -> float:
    """Distance ``||psi(x) - psi(y)||`` between two mapped samples."""
    k_xx = float(gram(x, x, spec)[0, 0])
    k_xy = float(gram(x, y, spec)[0, 0])
    k_yy = float(gram(y, y, spec)[0, 0])
    return float(_sqrt_clamped(k_xx - 2.0 * k_xy + k_yy, "feature_distance"))


def pairwise_feature_distances(X, spec: KernelSpec) -> np.ndarray:
    """All pairwise mapped distances among the rows of ``X``, as a matrix."""
    K = gram(X, X, spec)
    d = np.diag(K)
    return _sqrt_clamped(d[:, None] - 2.0 * K + d[None, :], "pairwise distances")

def class_center_sq(members, spec: KernelSpec) -> float:
    """Squared norm of the mapped class center, ``(1/p^2) * sum_jl K(a_j, a_l)``.

    Computed once per (class, kernel); reused by every distance-to-center
    query against the same class.
    """
    members = _as_rows(members)
    if members.shape[0] == 0:
        raise EmptyClass("class has no members")
    K = gram(members, members, spec)
    p = members.shape[0]
    return float(K.sum()) / (p * p)


def distances_to_center(X, members, spec: KernelSpec, center_sq: float | None = None) -> np.ndarray:
    """Distances from each row of ``X`` to the mapped center of ``members``.

    ``center_sq`` may carry a precomputed :func:`class_center_sq` value to
    avoid repeating the quadratic double sum.
    """
    X, members = _as_rows(X), _as_rows(members)
    if members.shape[0] == 0:
        raise EmptyClass("class has no members")
    if center_sq is None:
        center_sq = class_center_sq(members, spec)
    if spec.kind == LINEAR:
        self_k = np.sum(X * X, axis=1)
    else:
        self_k = np.ones(X.shape[0])
    cross = gram(X, members, spec).mean(axis=1)
    return _sqrt_clamped(self_k - 2.0 * cross + center_sq, "distance_to_center")


def distance_to_center(x, members, spec: KernelSpec) -> float:
    """Distance from one sample to the mapped center of ``members``."""
    return float(distances_to_center(x, members, spec)[0])
