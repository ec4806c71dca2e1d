"""Shared random-instance generators; every test seeds its own generator."""

import numpy as np
import pytest


def random_metzler_pair(rng, n_low=2, n_high=10):
    """A Metzler, B >= 0, with A + B made Hurwitz by a diagonal shift."""
    n = int(rng.integers(n_low, n_high + 1))
    A = rng.uniform(0.0, 1.0, (n, n))
    np.fill_diagonal(A, 0.0)
    B = rng.uniform(0.0, 0.5, (n, n))
    # Gershgorin: shifting the diagonal below the combined row sums makes
    # A + B strictly diagonally dominant, hence Hurwitz.
    row_sums = (A + B).sum(axis=1)
    shift = row_sums.max() + rng.uniform(0.05, 0.5)
    np.fill_diagonal(A, -shift)
    return A, B


def random_triangular_pair(rng, force=None):
    """Triangular (A, B) sharing an orientation; force=True/False picks the
    side of the stability dichotomy, None mixes them."""
    n = int(rng.integers(2, 6))
    lower = bool(rng.integers(0, 2))
    A = np.zeros((n, n))
    B = np.zeros((n, n))
    for i in range(n):
        a = -float(rng.uniform(0.5, 2.0))
        A[i, i] = a
        B[i, i] = float(rng.uniform(-0.9, 0.9)) * abs(a)
    stable = bool(rng.integers(0, 2)) if force is None else force
    if not stable:
        j = int(rng.integers(0, n))
        if rng.integers(0, 2):
            A[j, j] = float(rng.uniform(0.0, 1.0))
        else:
            B[j, j] = float(rng.choice([-1.0, 1.0])) * abs(A[j, j]) * float(rng.uniform(1.0, 1.5))
    idx = np.tril_indices(n, -1) if lower else np.triu_indices(n, 1)
    A[idx] = rng.uniform(-0.5, 0.5, size=idx[0].size)
    B[idx] = rng.uniform(-0.3, 0.3, size=idx[0].size)
    return A, B


def random_psd_witness_blocks(rng, n):
    """PSD 2n x 2n block matrix with diag(H11) >= diag(H22)."""
    L = rng.normal(size=(2 * n, 2 * n))
    H = L @ L.T
    h11 = H[:n, :n].copy()
    h12 = H[:n, n:].copy()
    h22 = H[n:, n:].copy()
    lift = np.clip(np.diag(h22) - np.diag(h11), 0.0, None) + rng.uniform(0.0, 0.1, n)
    h11 += np.diag(lift)
    return h11, h12, h22


@pytest.fixture
def rng():
    return np.random.default_rng(0)
