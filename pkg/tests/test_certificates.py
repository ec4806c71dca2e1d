"""Block LMI assembly, certificate verification, and the trace identity."""

import numpy as np
import pytest

from riccert import (
    DiagonalPair,
    NotNegativeDefinite,
    VerificationError,
    lyapunov_consequences,
    riccati_block,
    riccati_form,
    trace_identity_residual,
    verify_certificate,
)
from riccert.matrices import eigmax_sym

from conftest import random_psd_witness_blocks

# the 2x2 pair with no diagonal certificate, used as a fixture throughout
A_HARD = np.array([[-1.0, 0.0], [-2.0, -1.0]])
B_HARD = np.diag([-10.0, -10.0])


class TestDiagonalPair:
    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            DiagonalPair(np.array([1.0, 0.0]), np.ones(2))
        with pytest.raises(ValueError):
            DiagonalPair(np.ones(2), np.array([1.0, -1.0]))

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            DiagonalPair(np.ones(2), np.ones(3))


class TestBlockAssembly:
    def test_frozen_top_left(self):
        # p = (4,1), q = (1,1): A'P + PA + Q worked out by hand
        pair = DiagonalPair(np.array([4.0, 1.0]), np.ones(2))
        S = riccati_block(A_HARD, B_HARD, pair)
        np.testing.assert_allclose(S[:2, :2], [[-7.0, -2.0], [-2.0, -1.0]], atol=0)
        np.testing.assert_allclose(S[:2, 2:], np.diag([-40.0, -10.0]), atol=0)
        np.testing.assert_allclose(S[2:, 2:], -np.eye(2), atol=0)

    def test_exact_symmetry(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = int(rng.integers(2, 7))
            A = rng.normal(size=(n, n))
            B = rng.normal(size=(n, n))
            pair = DiagonalPair(np.exp(rng.normal(size=n)), np.exp(rng.normal(size=n)))
            S = riccati_block(A, B, pair)
            assert (S == S.T).all()

    def test_scaling_homogeneity(self):
        A = np.array([[-2.0, 1.0], [1.0, -2.0]])
        B = 0.5 * np.eye(2)
        pair = DiagonalPair(np.ones(2), np.ones(2))
        S1 = riccati_block(A, B, pair)
        for t in (0.5, 2.0):
            pair_t = DiagonalPair(t * pair.p, t * pair.q)
            np.testing.assert_allclose(riccati_block(A, B, pair_t), t * S1, atol=0)


class TestVerifyCertificate:
    def test_worked_example_margin(self):
        A = np.array([[-2.0, 1.0], [1.0, -2.0]])
        B = 0.5 * np.eye(2)
        cert = verify_certificate(A, B, DiagonalPair(np.ones(2), np.ones(2)))
        assert abs(cert.lambda_max - (-0.5)) < 1e-12
        assert abs(cert.beta - 0.25) < 1e-12

    def test_schur_complement_frozen(self):
        # eliminating the delayed block gives [[-2.75, 2], [2, -2.75]]
        A = np.array([[-2.0, 1.0], [1.0, -2.0]])
        B = 0.5 * np.eye(2)
        pair = DiagonalPair(np.ones(2), np.ones(2))
        R = riccati_form(A, B, pair)
        np.testing.assert_allclose(R, [[-2.75, 2.0], [2.0, -2.75]], atol=1e-14)
        eigs = np.linalg.eigvalsh(R)
        np.testing.assert_allclose(eigs, [-4.75, -0.75], atol=1e-12)

    def test_infeasible_pair_rejected(self):
        pair = DiagonalPair(np.array([4.0, 1.0]), np.ones(2))
        with pytest.raises(NotNegativeDefinite) as info:
            verify_certificate(A_HARD, B_HARD, pair)
        assert info.value.lambda_max > 0

    def test_trivial_decoupled(self):
        cert = verify_certificate(-np.eye(3), np.zeros((3, 3)), DiagonalPair(np.ones(3), np.ones(3)))
        assert abs(cert.lambda_max + 1.0) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            verify_certificate(-np.eye(2), np.zeros((2, 2)), DiagonalPair(np.ones(3), np.ones(3)))


class TestLyapunovConsequences:
    def test_hard_pair_passes_both(self):
        # both 1-D consequences hold although no certificate exists
        both = lyapunov_consequences(A_HARD, B_HARD, np.array([4.0, 1.0]))
        assert both == (True, True)

    def test_second_condition_fails_for_large_B(self):
        got = lyapunov_consequences(-np.eye(2), 3.0 * np.eye(2), np.ones(2))
        assert got == (True, False)

    def test_first_condition_fails_for_unstable_A(self):
        got = lyapunov_consequences(np.eye(2), np.zeros((2, 2)), np.ones(2))
        assert got[0] is False


class TestTraceIdentity:
    def test_zero_matrix(self):
        pair = DiagonalPair(np.ones(2), np.ones(2))
        assert trace_identity_residual(A_HARD, B_HARD, pair, np.zeros((4, 4))) == 0.0

    def test_hard_pair_witness(self):
        pair = DiagonalPair(np.array([4.0, 1.0]), np.ones(2))
        H = np.block([[3.0 * np.eye(2), -np.eye(2)], [-np.eye(2), 2.0 * np.eye(2)]])
        assert trace_identity_residual(A_HARD, B_HARD, pair, H) <= 1e-10

    def test_random_family(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            n = int(rng.integers(2, 5))
            A = rng.normal(size=(n, n))
            B = rng.normal(size=(n, n))
            pair = DiagonalPair(np.exp(rng.normal(size=n)), np.exp(rng.normal(size=n)))
            h11, h12, h22 = random_psd_witness_blocks(rng, n)
            H = np.block([[h11, h12], [h12.T, h22]])
            S = riccati_block(A, B, pair)
            scale = 1.0 + abs(np.trace(H @ S))
            assert trace_identity_residual(A, B, pair, H) <= 1e-10 * scale

    def test_rejects_asymmetric(self):
        pair = DiagonalPair(np.ones(2), np.ones(2))
        H = np.eye(4)
        H[0, 1] = 5.0
        with pytest.raises(ValueError):
            trace_identity_residual(A_HARD, B_HARD, pair, H)


def test_riccati_form_matches_block_sign():
    rng = np.random.default_rng(5)
    agreements = 0
    for _ in range(200):
        n = int(rng.integers(2, 7))
        A = rng.normal(size=(n, n)) - 0.5 * np.eye(n)
        B = 0.5 * rng.normal(size=(n, n))
        pair = DiagonalPair(np.exp(rng.normal(size=n)), np.exp(rng.normal(size=n)))
        lam_block = eigmax_sym(riccati_block(A, B, pair))
        lam_riccati = eigmax_sym(riccati_form(A, B, pair))
        if abs(lam_block) < 1e-6:
            continue
        assert (lam_block < 0) == (lam_riccati < 0)
        agreements += 1
    assert agreements > 150
