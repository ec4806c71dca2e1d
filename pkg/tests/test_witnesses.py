"""Infeasibility witnesses and the triangular fast paths."""

import numpy as np
import pytest

from riccert import (
    InfeasibilityWitness,
    InvalidWitness,
    NotTriangular,
    PreconditionError,
    triangular_decision,
    triangular_orientation,
    triangular_witness,
    verify_witness,
    witness_diagonal,
    witness_min_diag,
)

A_HARD = np.array([[-1.0, 0.0], [-2.0, -1.0]])
B_HARD = np.diag([-10.0, -10.0])


class TestWitnessValidation:
    def test_zero_matrix_rejected(self):
        w = InfeasibilityWitness(np.zeros((2, 2)), np.zeros((2, 2)), np.zeros((2, 2)))
        with pytest.raises(InvalidWitness):
            w.validate()

    def test_indefinite_rejected(self):
        w = InfeasibilityWitness(-np.eye(2), np.zeros((2, 2)), np.zeros((2, 2)))
        with pytest.raises(InvalidWitness):
            w.validate()

    def test_diagonal_dominance_between_blocks(self):
        # diag(H22) > diag(H11) violates the witness shape
        w = InfeasibilityWitness(np.eye(2), np.zeros((2, 2)), 2.0 * np.eye(2))
        with pytest.raises(InvalidWitness):
            w.validate()

    def test_asymmetric_block_rejected(self):
        h11 = np.array([[1.0, 0.5], [0.0, 1.0]])
        w = InfeasibilityWitness(h11, np.zeros((2, 2)), np.eye(2))
        with pytest.raises(InvalidWitness):
            w.validate()

    def test_valid_witness_accepted(self):
        w = InfeasibilityWitness(3.0 * np.eye(2), -np.eye(2), 2.0 * np.eye(2))
        w.validate()
        assert w.n == 2


class TestVerifyWitness:
    def test_hard_pair_dense_witness(self):
        w = InfeasibilityWitness(3.0 * np.eye(2), -np.eye(2), 2.0 * np.eye(2))
        np.testing.assert_allclose(witness_diagonal(A_HARD, B_HARD, w), [7.0, 7.0], atol=0)
        assert verify_witness(A_HARD, B_HARD, w)
        assert verify_witness(A_HARD, B_HARD, w, strict=True)

    def test_rank_one_witness_boundary(self):
        # second diagonal entry is exactly zero: non-strict passes, strict fails
        e1 = np.zeros((2, 2))
        e1[0, 0] = 1.0
        w = InfeasibilityWitness(e1, -e1, e1)
        np.testing.assert_allclose(witness_diagonal(A_HARD, B_HARD, w), [9.0, 0.0], atol=0)
        assert verify_witness(A_HARD, B_HARD, w, tol=0.0)
        assert not verify_witness(A_HARD, B_HARD, w, strict=True)

    def test_negative_diagonal_fails(self):
        w = InfeasibilityWitness(np.eye(2), np.zeros((2, 2)), np.eye(2))
        # A = -I makes the diagonal (-1, -1)
        assert not verify_witness(-np.eye(2), np.zeros((2, 2)), w)

    def test_min_diag(self):
        w = InfeasibilityWitness(3.0 * np.eye(2), -np.eye(2), 2.0 * np.eye(2))
        assert witness_min_diag(A_HARD, B_HARD, w) == 7.0


class TestTriangularOrientation:
    def test_lower(self):
        assert triangular_orientation(A_HARD, B_HARD) == "lower"

    def test_upper(self):
        A = np.array([[-1.0, 2.0], [0.0, -1.0]])
        assert triangular_orientation(A, np.diag([0.5, 0.5])) == "upper"

    def test_diagonal_reports_lower(self):
        assert triangular_orientation(-np.eye(2), np.eye(2)) == "lower"

    def test_dense_is_none(self):
        A = np.array([[-1.0, 1.0], [1.0, -1.0]])
        assert triangular_orientation(A, np.zeros((2, 2))) is None

    def test_mixed_orientations_none(self):
        A = np.array([[-1.0, 1.0], [0.0, -1.0]])
        B = np.array([[0.1, 0.0], [0.3, 0.1]])
        assert triangular_orientation(A, B) is None


class TestTriangularDecision:
    def test_hard_pair_false(self):
        assert triangular_decision(A_HARD, B_HARD) is False

    def test_strictly_dominated_true(self):
        A = np.array([[-2.0, 0.0], [1.0, -3.0]])
        B = np.diag([1.0, -2.0])
        assert triangular_decision(A, B) is True

    def test_dense_raises(self):
        with pytest.raises(NotTriangular):
            triangular_decision(np.array([[-1.0, 1.0], [1.0, -1.0]]), np.zeros((2, 2)))

    def test_random_dichotomy_is_exclusive(self):
        from conftest import random_triangular_pair

        rng = np.random.default_rng(21)
        for _ in range(100):
            A, B = random_triangular_pair(rng)
            decided = triangular_decision(A, B)
            if decided:
                with pytest.raises(PreconditionError):
                    triangular_witness(A, B)
            else:
                w = triangular_witness(A, B)
                assert verify_witness(A, B, w, tol=0.0)


class TestTriangularWitness:
    def test_unstable_diagonal_entry(self):
        A = np.diag([1.0, -1.0])
        w = triangular_witness(A, np.zeros((2, 2)))
        # one-block witness at the offending index
        np.testing.assert_allclose(w.h11, np.diag([1.0, 0.0]), atol=0)
        np.testing.assert_allclose(w.h22, np.zeros((2, 2)), atol=0)
        assert verify_witness(A, np.zeros((2, 2)), w, tol=0.0)

    def test_dominating_delay_entry(self):
        A = np.diag([-1.0, -1.0])
        B = np.diag([1.0, 0.0])
        w = triangular_witness(A, B)
        d = witness_diagonal(A, B, w)
        np.testing.assert_allclose(d, [0.0, 0.0], atol=0)
        assert verify_witness(A, B, w, tol=0.0)
        assert not verify_witness(A, B, w, strict=True, tol=1e-7)

    def test_sign_handling_negative_b(self):
        A = np.diag([-1.0, -1.0])
        B = np.diag([-1.5, 0.0])
        w = triangular_witness(A, B)
        assert verify_witness(A, B, w, tol=0.0)
        assert witness_diagonal(A, B, w)[0] == 0.5

    def test_hard_pair_witness_shape(self):
        w = triangular_witness(A_HARD, B_HARD)
        np.testing.assert_allclose(witness_diagonal(A_HARD, B_HARD, w), [9.0, 0.0], atol=0)

    def test_stable_pair_raises(self):
        with pytest.raises(PreconditionError):
            triangular_witness(np.diag([-2.0, -2.0]), np.eye(2))
