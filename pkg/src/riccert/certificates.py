"""Diagonal Riccati stability certificates.

A certificate for the pair (A, B) is a pair of positive diagonal matrices
P = diag(p), Q = diag(q) making the symmetric block matrix

    S = [[A^T P + P A + Q,  P B],
         [B^T P,           -Q  ]]

negative definite.  By a Schur complement argument this is equivalent to the
Riccati form A^T P + P A + Q + P B Q^{-1} B^T P being negative definite;
``verify_certificate`` runs both tests and treats disagreement as an internal
bug.  The decay rate attached to a verified certificate is
beta = -lambda_max(S) / 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, NotNegativeDefinite, VerificationError
from .matrices import DEFAULT_TOL, as_square, as_vector, eigmax_sym

__all__ = [
    "DiagonalPair",
    "RiccatiCertificate",
    "riccati_block",
    "riccati_form",
    "verify_certificate",
    "lyapunov_consequences",
    "trace_identity_residual",
]


@dataclass
class DiagonalPair:
    """Strictly positive diagonals p, q of equal length."""

    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        self.p = as_vector(self.p, name="p")
        self.q = as_vector(self.q, self.p.size, name="q")
        if not (self.p > 0.0).all():
            raise ValueError("p must be strictly positive")
        if not (self.q > 0.0).all():
            raise ValueError("q must be strictly positive")

    @property
    def n(self) -> int:
        return self.p.size


@dataclass
class RiccatiCertificate:
    """A verified pair together with its margin and decay rate.

    lambda_max is the largest eigenvalue of the block matrix S (negative for a
    valid certificate) and beta = -lambda_max / 2.
    """

    pair: DiagonalPair
    lambda_max: float
    beta: float


def _block(A: np.ndarray, B: np.ndarray, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    # Assembled so S is symmetric bit-for-bit: the (i,j)/(j,i) entries of the
    # top-left block are the same two products added in either order, and the
    # bottom-left block is the exact transpose of the top-right one.
    n = A.shape[0]
    top_left = A.T * p[None, :] + p[:, None] * A + np.diag(q)
    pb = p[:, None] * B
    S = np.empty((2 * n, 2 * n))
    S[:n, :n] = top_left
    S[:n, n:] = pb
    S[n:, :n] = pb.T
    S[n:, n:] = -np.diag(q)
    return S


def _check_pair_shapes(A, B, pair: DiagonalPair):
    A = as_square(A, "A")
    B = as_square(B, "B")
    if A.shape != B.shape:
        raise DimensionError(f"A and B must have the same shape, got {A.shape} and {B.shape}")
    if pair.n != A.shape[0]:
        raise DimensionError(f"pair has length {pair.n}, matrices have size {A.shape[0]}")
    return A, B


def riccati_block(A, B, pair: DiagonalPair) -> np.ndarray:
    """The symmetric 2n x 2n block matrix S for (A, B) and the given pair."""
    A, B = _check_pair_shapes(A, B, pair)
    return _block(A, B, pair.p, pair.q)


def riccati_form(A, B, pair: DiagonalPair) -> np.ndarray:
    """The n x n Riccati expression A^T P + P A + Q + P B Q^{-1} B^T P."""
    A, B = _check_pair_shapes(A, B, pair)
    p, q = pair.p, pair.q
    pb = p[:, None] * B
    return A.T * p[None, :] + p[:, None] * A + np.diag(q) + (pb / q[None, :]) @ pb.T


def verify_certificate(A, B, pair: DiagonalPair, tol: float = DEFAULT_TOL) -> RiccatiCertificate:
    """Check that (p, q) certifies the pair (A, B); return the verified object.

    Raises ``NotNegativeDefinite`` (carrying lambda_max) when the block matrix
    is not negative definite at the tolerance.  On success the equivalent
    Riccati form is cross-checked; the two tests disagreeing means a bug in
    the assembly, reported as ``VerificationError``.
    """
    A, B = _check_pair_shapes(A, B, pair)
    S = _block(A, B, pair.p, pair.q)
    lam = float(np.linalg.eigvalsh(S)[-1])
    if not lam < -tol:
        raise NotNegativeDefinite(lam)
    lam_riccati = eigmax_sym(riccati_form(A, B, pair))
    if not lam_riccati < 0.0:
        raise VerificationError(
            f"block test and Riccati form disagree (lambda_max {lam:.6g} vs {lam_riccati:.6g})"
        )
    return RiccatiCertificate(pair=pair, lambda_max=lam, beta=-lam / 2.0)


def lyapunov_consequences(A, B, p, tol: float = DEFAULT_TOL) -> tuple[bool, bool]:
    """Whether diag(p) solves the diagonal Lyapunov inequality for A and A+B.

    Both hold for the P of any certificate; the converse fails, so this is a
    cheap necessary check, not a decision procedure.
    """
    A = as_square(A, "A")
    B = as_square(B, "B")
    if A.shape != B.shape:
        raise DimensionError(f"A and B must have the same shape, got {A.shape} and {B.shape}")
    w = as_vector(p, A.shape[0], "p")
    if not (w > 0.0).all():
        raise ValueError("p must be strictly positive")

    def nd(M):
        lyap = M.T * w[None, :] + w[:, None] * M
        return bool(eigmax_sym(lyap) < -tol)

    return nd(A), nd(A + B)


def trace_identity_residual(A, B, pair: DiagonalPair, H) -> float:
    """|trace(H S) - trace(2 P (A H11 + B H12^T)) - trace(Q (H11 - H22))|.

    The two sides are computed through independent code paths (full block
    assembly vs diagonal contractions), so a small residual exercises the
    block bookkeeping.  ``H`` is any symmetric 2n x 2n matrix split into n x n
    blocks [[H11, H12], [H12^T, H22]].
    """
    A, B = _check_pair_shapes(A, B, pair)
    n = A.shape[0]
    Hm = as_square(H, "H")
    if Hm.shape[0] != 2 * n:
        raise DimensionError(f"H must be {2 * n} x {2 * n}, got {Hm.shape}")
    if np.max(np.abs(Hm - Hm.T)) > 1e-9 * max(1.0, float(np.max(np.abs(Hm)))):
        raise ValueError("H must be symmetric")
    S = _block(A, B, pair.p, pair.q)
    lhs = float(np.einsum("ij,ji->", Hm, S))
    h11 = Hm[:n, :n]
    h12 = Hm[:n, n:]
    h22 = Hm[n:, n:]
    diag_prod = np.einsum("ij,ji->i", A, h11) + np.einsum("ij,ij->i", B, h12)
    rhs = float(2.0 * np.dot(pair.p, diag_prod) + np.dot(pair.q, np.diag(h11) - np.diag(h22)))
    return abs(lhs - rhs)
