"""Eigensolver unit tests.

Covers hand-computed smallest eigenpairs, residual bounds on random
instances, agreement with an independent Cholesky-reduction oracle,
canonical sign and tie determinism, and the error contract for bad inputs.
"""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eigensvm import linalg
from eigensvm.errors import (
    DimensionMismatch,
    IndefiniteDenominator,
    NonFinite,
    NotSymmetric,
)


def random_symmetric(rng, order):
    M = rng.normal(size=(order, order))
    return (M + M.T) / 2.0


def random_spd(rng, order, floor=0.1):
    M = rng.normal(size=(order, order))
    return M @ M.T + floor * np.eye(order)


# ===================================================================
# Hand-computed cases
# ===================================================================

def test_sym_diagonal_two_by_two():
    pair = linalg.sym_eig_smallest(np.diag([2.0, 1.0]))
    assert pair.value == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(pair.vector, [0.0, 1.0], atol=1e-12)


def test_sym_diagonal_negative_entry():
    pair = linalg.sym_eig_smallest(np.diag([5.0, -3.0, 0.0]))
    assert pair.value == pytest.approx(-3.0, abs=1e-12)
    assert np.allclose(pair.vector, [0.0, 1.0, 0.0], atol=1e-12)


def test_gen_diagonal_ratio():
    # ratios 4/2 and 9/3: the smallest generalized eigenvalue is 2
    pair = linalg.gen_eig_smallest(np.diag([4.0, 9.0]), np.diag([2.0, 3.0]))
    assert pair.value == pytest.approx(2.0, rel=1e-9)
    assert np.allclose(np.abs(pair.vector), [1.0, 0.0], atol=1e-9)


def test_gen_reduces_to_sym_for_identity_denominator():
    rng = np.random.default_rng(7)
    M = random_symmetric(rng, 6)
    a = linalg.sym_eig_smallest(M)
    b = linalg.gen_eig_smallest(M, np.eye(6))
    assert a.value == pytest.approx(b.value, rel=1e-10, abs=1e-10)
    assert np.allclose(a.vector, b.vector, atol=1e-8)


def test_sym_shift_invariance():
    rng = np.random.default_rng(11)
    M = random_symmetric(rng, 8)
    base = linalg.sym_eig_smallest(M)
    shifted = linalg.sym_eig_smallest(M + 3.25 * np.eye(8))
    assert shifted.value == pytest.approx(base.value + 3.25, rel=1e-10, abs=1e-10)
    assert np.allclose(shifted.vector, base.vector, atol=1e-9)


# ===================================================================
# Output conventions
# ===================================================================

def test_vector_is_unit_norm_with_canonical_sign():
    rng = np.random.default_rng(3)
    for k in range(20):
        M = random_symmetric(rng, int(rng.integers(2, 12)))
        pair = linalg.sym_eig_smallest(M)
        assert np.linalg.norm(pair.vector) == pytest.approx(1.0, abs=1e-12)
        nz = np.nonzero(np.abs(pair.vector) > 1e-12)[0]
        assert pair.vector[nz[0]] > 0.0


def test_tie_breaking_is_deterministic():
    # identity has a fully degenerate spectrum; repeated solves must agree
    first = linalg.sym_eig_smallest(np.eye(5))
    second = linalg.sym_eig_smallest(np.eye(5))
    assert first.value == second.value
    assert np.array_equal(first.vector, second.vector)


# ===================================================================
# Residual bounds and the Cholesky-reduction oracle
# ===================================================================

def test_sym_residual_bound_random():
    rng = np.random.default_rng(123)
    for k in range(60):
        order = int(rng.integers(2, 40))
        M = random_symmetric(rng, order)
        pair = linalg.sym_eig_smallest(M)
        res = np.linalg.norm(M @ pair.vector - pair.value * pair.vector)
        assert res <= 1e-8 * (1.0 + np.linalg.norm(M))


def test_gen_residual_bound_random():
    rng = np.random.default_rng(456)
    for k in range(60):
        order = int(rng.integers(2, 40))
        N = random_symmetric(rng, order)
        D = random_spd(rng, order)
        pair = linalg.gen_eig_smallest(N, D)
        res = np.linalg.norm(N @ pair.vector - pair.value * (D @ pair.vector))
        assert res <= 1e-8 * (1.0 + np.linalg.norm(N) + abs(pair.value) * np.linalg.norm(D))


def test_gen_matches_cholesky_reduction_oracle():
    # independent reduction: D = LL', solve L^-1 N L^-T as an ordinary
    # symmetric problem, compare smallest eigenvalues
    rng = np.random.default_rng(789)
    for k in range(40):
        order = int(rng.integers(2, 30))
        N = random_symmetric(rng, order)
        D = random_spd(rng, order)
        pair = linalg.gen_eig_smallest(N, D)
        eps = 1e-12 * np.trace(D) / order
        L = np.linalg.cholesky(D + eps * np.eye(order))
        Li = np.linalg.inv(L)
        reduced = Li @ N @ Li.T
        lam = float(np.linalg.eigvalsh((reduced + reduced.T) / 2.0)[0])
        assert pair.value == pytest.approx(lam, rel=1e-8, abs=1e-8)


def test_gen_stabilizes_rank_deficient_denominator():
    # D is PSD with a null space; the ridge makes the pencil solvable
    N = np.diag([3.0, 1.0])
    D = np.diag([1.0, 0.0])
    pair = linalg.gen_eig_smallest(N, D, ridge=1e-12)
    assert np.isfinite(pair.value)
    # the z2 direction has quotient 1/eps, enormous; z1 gives 3
    assert pair.value == pytest.approx(3.0, rel=1e-6)


@given(st.integers(min_value=2, max_value=15), st.integers(min_value=0, max_value=10**6))
@settings(max_examples=40, deadline=None)
def test_gen_value_is_rayleigh_minimum(order, seed):
    # no random probe direction may undercut the returned quotient
    rng = np.random.default_rng(seed)
    N = random_symmetric(rng, order)
    D = random_spd(rng, order)
    pair = linalg.gen_eig_smallest(N, D)
    probes = rng.normal(size=(20, order))
    for z in probes:
        quot = (z @ N @ z) / (z @ D @ z)
        assert quot >= pair.value - 1e-7 * (1.0 + abs(pair.value))


# ===================================================================
# Error contract
# ===================================================================

def test_rejects_asymmetric_matrix():
    M = np.array([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(NotSymmetric):
        linalg.sym_eig_smallest(M)


def test_rejects_non_square():
    with pytest.raises(DimensionMismatch):
        linalg.sym_eig_smallest(np.ones((2, 3)))


def test_rejects_nan():
    M = np.array([[np.nan, 0.0], [0.0, 1.0]])
    with pytest.raises(NonFinite):
        linalg.sym_eig_smallest(M)


def test_rejects_order_mismatch():
    with pytest.raises(DimensionMismatch):
        linalg.gen_eig_smallest(np.eye(2), np.eye(3))


def test_indefinite_denominator_raises():
    with pytest.raises(IndefiniteDenominator):
        linalg.gen_eig_smallest(np.eye(2), -np.eye(2))


def test_zero_denominator_zero_ridge_raises():
    # trace(D)=0 makes eps=0, leaving a singular denominator
    with pytest.raises(IndefiniteDenominator):
        linalg.gen_eig_smallest(np.eye(2), np.zeros((2, 2)))
