"""Dense symmetric and symmetric-definite generalized eigensolvers.

Every classifier fit in this package reduces to one of two problems:

* the smallest eigenpair of a symmetric matrix, or
* the smallest eigenpair of the pencil ``(N, D)`` with ``D`` positive
  semidefinite, i.e. the minimizer of the generalized Rayleigh quotient
  ``z'Nz / z'Dz``.

The denominator of a pencil may be rank deficient, so it is stabilized as
``D + eps*I`` with ``eps = ridge * trace(D) / order`` before the solve.
Eigenvectors are returned with unit Euclidean norm and a canonical sign
(first nonzero component positive) so results are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, IndefiniteDenominator, NonFinite, NotSymmetric

SYMMETRY_ATOL = 1e-10
EIGENVALUE_TIE_RTOL = 1e-10


@dataclass(frozen=True)
class EigenPair:
    """Eigenvalue plus unit-norm eigenvector with canonical sign."""

    value: float
    vector: np.ndarray


def check_symmetric(M: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Validate that ``M`` is a finite, square, symmetric 2-D array.

    Returns the input as a float64 array. Raises :class:`NonFinite` or
    :class:`NotSymmetric` (absolute tolerance ``1e-10``) otherwise.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NonFinite(f"{name} contains NaN or Inf")
    if not np.allclose(M, M.T, rtol=0.0, atol=SYMMETRY_ATOL):
        worst = float(np.abs(M - M.T).max())
        raise NotSymmetric(f"{name} asymmetry {worst:.3e} exceeds {SYMMETRY_ATOL:.0e}")
    return M


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    """Flip ``v`` so its first non-negligible component is positive."""
    scale = np.abs(v).max()
    if scale == 0.0:
        return v
    nz = np.nonzero(np.abs(v) > 1e-12 * scale)[0]
    if nz.size and v[nz[0]] < 0.0:
        return -v
    return v


def _pick_smallest(values: np.ndarray, vectors: np.ndarray) -> EigenPair:
    """Select the smallest eigenvalue; break ties lexicographically.

    ``vectors`` holds eigenvectors in columns, ordered like ``values``
    (ascending, as LAPACK returns them).
    """
    lam = float(values[0])
    tol = EIGENVALUE_TIE_RTOL * (1.0 + abs(lam))
    tied = np.nonzero(values <= lam + tol)[0]
    best = None
    for j in tied:
        v = _canonical_sign(vectors[:, j].copy())
        v /= np.linalg.norm(v)
        if best is None or tuple(v) < tuple(best):
            best = v
    return EigenPair(value=lam, vector=best)


def sym_eig_smallest(M: np.ndarray) -> EigenPair:
    """Smallest eigenpair of a symmetric matrix.

    Parameters
    ----------
    M
        Square symmetric matrix (absolute symmetry tolerance 1e-10).

    Returns
    -------
    EigenPair
        ``(value, vector)`` with ``||M v - value*v|| <= 1e-8 * (1 + ||M||_F)``
        and ``||vector|| == 1``.
    """
    M = check_symmetric(M, "M")
    values, vectors = np.linalg.eigh(M)
    return _pick_smallest(values, vectors)


def gen_eig_smallest(N: np.ndarray, D: np.ndarray, ridge: float = 1e-12) -> EigenPair:
    """Smallest eigenpair of the symmetric-definite pencil ``(N, D + eps*I)``.

    Minimizes the generalized Rayleigh quotient ``z'Nz / z'(D+eps*I)z``
    where ``eps = ridge * trace(D) / order`` guards against a rank-deficient
    denominator. With ridge at its tiny default the solution matches the
    unstabilized pencil to machine precision whenever ``D`` is definite.

    Parameters
    ----------
    N, D
        Symmetric matrices of equal order; ``D`` positive semidefinite.
    ridge
        Nonnegative denominator stabilizer, relative to ``trace(D)/order``.

    Raises
    ------
    IndefiniteDenominator
        If ``D + eps*I`` is not positive definite even after stabilization.
    """
    N = check_symmetric(N, "N")
    D = check_symmetric(D, "D")
    if N.shape != D.shape:
        raise DimensionMismatch(f"order mismatch: N {N.shape} vs D {D.shape}")
    if ridge < 0:
        raise ValueError("ridge must be nonnegative")
    order = D.shape[0]
    eps = ridge * float(np.trace(D)) / order
    D_stab = D + eps * np.eye(order)
    try:
        values, vectors = scipy.linalg.eigh(N, D_stab)
    except (scipy.linalg.LinAlgError, np.linalg.LinAlgError) as exc:
        raise IndefiniteDenominator(
            f"denominator not positive definite (eps={eps:.3e}): {exc}"
        ) from exc
    # scipy normalizes generalized eigenvectors to z'(D+eps*I)z = 1, and the
    # pencil itself is solved on the stabilized denominator, so residuals are
    # checked against D_stab by callers/tests.
    pair = _pick_smallest(values, vectors)
    if not np.isfinite(pair.value) or not np.all(np.isfinite(pair.vector)):
        raise IndefiniteDenominator(
            f"solver returned non-finite eigenpair (eps={eps:.3e})"
        )
    return pair
