"""Sample scoring tests.

The scoring scheme assigns every training sample a membership mu (distance
to its own class center relative to the class radius), a non-membership nu
(share of opposite-label neighbors within radius beta), and a combined
weight s in [0, 1]. These tests pin hand-computed values for all three
formulas, verify the neighborhood count against a brute-force loop, and
check the symmetry and range invariants.
"""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eigensvm import ifscore, kernels
from eigensvm.errors import DomainViolation, EmptyClass
from eigensvm.ifscore import IfParams, compute_scores, score, score_matrices
from eigensvm.kernels import KernelSpec

LIN = KernelSpec("linear")


def blob_pair(seed, m=30, n=3, sep=3.0):
    rng = np.random.default_rng(seed)
    half = m // 2
    X = np.vstack([
        rng.normal(0.0, 1.0, size=(half, n)),
        rng.normal(sep, 1.0, size=(m - half, n)),
    ])
    y = np.concatenate([np.ones(half), -np.ones(m - half)]).astype(int)
    return X, y


# ===================================================================
# Hand-computed formula values
# ===================================================================

def test_membership_hand_case():
    # class {0,1,2} on a line: center 1, radius 1; mu(0) = 1 - 1/1.1
    X = np.array([[0.0], [1.0], [2.0], [5.0], [6.0]])
    y = np.array([1, 1, 1, -1, -1])
    sc = compute_scores(X, y, IfParams(gamma=0.1, score_kernel=LIN))
    assert sc.mu[0] == pytest.approx(1.0 / 11.0, abs=1e-12)
    assert sc.mu[1] == pytest.approx(1.0, abs=1e-12)
    assert sc.class_radii[0] == pytest.approx(1.0, abs=1e-12)


def test_full_triple_hand_case():
    # +1 class {0, 1}, -1 class {0.5}; for x=0 with beta=0.6, gamma=1:
    #   center +1 = 0.5, radius 0.5, mu = 1 - 0.5/1.5 = 2/3
    #   ball around 0 holds {0, 0.5}: one hetero of two, eta = 1/2
    #   nu = (1 - 2/3)/2 = 1/6, s = (1 - 1/6)/(2 - 2/3 - 1/6) = 5/7
    X = np.array([[0.0], [1.0], [0.5]])
    y = np.array([1, 1, -1])
    sc = compute_scores(X, y, IfParams(gamma=1.0, beta=0.6, score_kernel=LIN))
    assert sc.mu[0] == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert sc.nu[0] == pytest.approx(1.0 / 6.0, abs=1e-12)
    assert sc.s[0] == pytest.approx(5.0 / 7.0, abs=1e-12)


def test_score_branches():
    # nu = 0 keeps s = mu; mu <= nu forces s = 0; otherwise the blend
    s = score(np.array([0.8, 0.3, 0.6]), np.array([0.0, 0.5, 0.2]))
    assert s[0] == pytest.approx(0.8, abs=1e-12)
    assert s[1] == 0.0
    assert s[2] == pytest.approx((1.0 - 0.2) / (2.0 - 0.6 - 0.2), abs=1e-12)


def test_score_rejects_out_of_domain():
    with pytest.raises(DomainViolation):
        score(np.array([1.5]), np.array([0.0]))
    with pytest.raises(DomainViolation):
        score(np.array([0.5]), np.array([0.9]))


def test_isolated_homogeneous_class_keeps_s_equal_mu():
    # tiny beta: nobody sees a hetero neighbor, so nu = 0 and s = mu
    X, y = blob_pair(0, sep=8.0)
    sc = compute_scores(X, y, IfParams(beta=1e-6, score_kernel=LIN))
    assert np.allclose(sc.nu, 0.0, atol=1e-15)
    assert np.allclose(sc.s, sc.mu, atol=1e-15)


def test_boundary_point_fully_suppressed():
    # x=10 sits at its class radius (mu ~ 0) inside a hetero neighborhood
    X = np.array([[0.0], [10.0], [9.5], [10.5]])
    y = np.array([1, 1, -1, -1])
    sc = compute_scores(X, y, IfParams(beta=1.0, score_kernel=LIN))
    assert sc.s[1] == 0.0


# ===================================================================
# Neighborhood count vs brute force
# ===================================================================

def test_eta_matches_brute_force():
    for seed in range(10):
        X, y = blob_pair(seed, m=24, n=2)
        params = IfParams()
        sc = compute_scores(X, y, params)
        spec = KernelSpec("gaussian", 1.0)
        beta = ifscore.resolve_beta(X, params)
        D = kernels.pairwise_feature_distances(X, spec)
        for i in range(len(y)):
            inball = D[i] <= beta
            eta = np.sum(inball & (y != y[i])) / max(int(np.sum(inball)), 1)
            assert sc.nu[i] == pytest.approx((1.0 - sc.mu[i]) * eta, abs=1e-10)


def test_auto_beta_is_median_pairwise_distance():
    X, y = blob_pair(3, m=15, n=2)
    params = IfParams(score_kernel=LIN)
    beta = ifscore.resolve_beta(X, params)
    iu = np.triu_indices(len(X), k=1)
    want = float(np.median(kernels.pairwise_feature_distances(X, LIN)[iu]))
    assert beta == pytest.approx(want, rel=1e-12)


# ===================================================================
# Invariants
# ===================================================================

@given(st.integers(min_value=0, max_value=10**6))
@settings(max_examples=40, deadline=None)
def test_ranges_hold_on_random_data(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(4, 40)), int(rng.integers(1, 6))
    X = rng.normal(size=(m, n))
    y = np.where(rng.random(m) < 0.5, 1, -1)
    y[:2] = [1, -1]  # both classes present
    sc = compute_scores(X, y, IfParams())
    assert np.all(sc.mu >= 0.0) and np.all(sc.mu <= 1.0)
    assert np.all(sc.nu >= -1e-15) and np.all(sc.nu <= 1.0 - sc.mu + 1e-12)
    assert np.all(sc.s >= 0.0) and np.all(sc.s <= 1.0)


def test_permutation_equivariance():
    X, y = blob_pair(7)
    rng = np.random.default_rng(0)
    perm = rng.permutation(len(y))
    a = compute_scores(X, y, IfParams())
    b = compute_scores(X[perm], y[perm], IfParams())
    assert np.allclose(a.s[perm], b.s, atol=1e-12)


def test_relabel_swap_symmetry():
    # flipping every label swaps the class score vectors
    X, y = blob_pair(9)
    s1, s2 = score_matrices(X, y, IfParams())
    t1, t2 = score_matrices(X, -y, IfParams())
    assert np.allclose(s1, t2, atol=1e-12)
    assert np.allclose(s2, t1, atol=1e-12)


def test_score_matrices_row_order():
    X, y = blob_pair(11)
    sc = compute_scores(X, y, IfParams())
    s1, s2 = score_matrices(X, y, IfParams())
    assert np.array_equal(s1, sc.s[y == 1])
    assert np.array_equal(s2, sc.s[y == -1])


def test_planted_mislabeled_point_scores_low():
    # a point relabeled into the far class should fall below that class's
    # median weight (full 100-seed sweep lives in the acceptance suite)
    for seed in (0, 1, 2, 3, 4):
        X, y = blob_pair(seed, m=40, n=3)
        lo, hi = X.min(axis=0), X.max(axis=0)
        X = (X - lo) / np.where(hi > lo, hi - lo, 1.0)
        flip = 5
        y2 = y.copy()
        y2[flip] = -y2[flip]
        sc = compute_scores(X, y2, IfParams())
        own = sc.s[y2 == y2[flip]]
        assert sc.s[flip] < np.median(own)


# ===================================================================
# Validation
# ===================================================================

def test_missing_class_raises():
    X = np.ones((3, 2))
    with pytest.raises(EmptyClass):
        compute_scores(X, np.array([1, 1, 1]), IfParams())


def test_params_validation():
    with pytest.raises(DomainViolation):
        IfParams(gamma=-0.1)
    with pytest.raises(DomainViolation):
        IfParams(beta=0.0)
