"""Constructive certificates for Metzler / nonnegative pairs.

When A is Metzler, B is entrywise nonnegative and A + B is Hurwitz, a
certificate always exists and can be built in closed form:

1. take the diagonal d with (A+B)^T D + D (A+B) negative definite (from the
   positive-vector construction), set p = d;
2. solve ((A+B)^T P + P (A+B)) v = -w with w = 1; the solution is strictly
   positive because the matrix is symmetric Metzler Hurwitz;
3. choose the diagonal q with q_i v_i = (B^T P v)_i + w_i / 2.

The resulting block matrix S maps (v, v) to (-w/2, -w/2); together with S
being Metzler and symmetric this forces negative definiteness.  The returned
pair is always re-verified through ``verify_certificate``.
"""

from __future__ import annotations

import numpy as np

from .certificates import DiagonalPair, verify_certificate
from .errors import (
    DimensionError,
    NoPositiveVector,
    NotNegativeDefinite,
    PreconditionError,
    VerificationError,
)
from .matrices import DEFAULT_TOL, as_square, is_hurwitz, is_metzler, is_nonnegative, metzler_diagonal_lyapunov
from .witnesses import InfeasibilityWitness

__all__ = ["metzler_pair_stable", "synthesize", "metzler_diag_bound"]


def _checked_pair(A, B):
    A = as_square(A, "A")
    B = as_square(B, "B")
    if A.shape != B.shape:
        raise DimensionError(f"A and B must have the same shape, got {A.shape} and {B.shape}")
    return A, B


def metzler_pair_stable(A, B, tol: float = DEFAULT_TOL) -> bool:
    """Decide certificate existence for A Metzler, B nonnegative.

    For such pairs a certificate exists iff A + B is Hurwitz, so the decision
    is a single eigensolve.  Raises ``PreconditionError`` when the structure
    assumptions fail.
    """
    A, B = _checked_pair(A, B)
    if not is_metzler(A, tol):
        raise PreconditionError("A is not Metzler")
    if not is_nonnegative(B, tol):
        raise PreconditionError("B is not entrywise nonnegative")
    return is_hurwitz(A + B, tol)


def synthesize(A, B, return_internals: bool = False):
    """Build a verified DiagonalPair for A Metzler, B >= 0, A + B Hurwitz.

    With ``return_internals=True`` also returns the vectors (v, w) of the
    construction, so the exact image identity S (v, v) = (-w/2, -w/2) can be
    checked externally.  Raises ``PreconditionError`` when the structural
    preconditions fail and ``VerificationError`` if any internal guarantee of
    the construction breaks down numerically.
    """
    A, B = _checked_pair(A, B)
    if not is_metzler(A):
        raise PreconditionError("A is not Metzler")
    if not is_nonnegative(B):
        raise PreconditionError("B is not entrywise nonnegative")
    M = A + B
    try:
        p = metzler_diagonal_lyapunov(M)
    except NoPositiveVector as exc:
        raise PreconditionError("A + B is not Hurwitz") from exc

    lyap = M.T * p[None, :] + p[:, None] * M
    w = np.ones(M.shape[0])
    v = np.linalg.solve(lyap, -w)
    # v >> 0 is guaranteed analytically; a tiny minimum relative to the
    # largest component signals numerical degeneracy rather than a real v.
    if not (v > 0.0).all() or v.min() <= 1e-12 * v.max():
        raise VerificationError("intermediate vector v lost strict positivity")
    q = (B.T @ (p * v) + 0.5 * w) / v
    pair = DiagonalPair(p, q)
    try:
        verify_certificate(A, B, pair)
    except NotNegativeDefinite as exc:
        raise VerificationError("synthesized pair failed verification") from exc
    if return_internals:
        return pair, v, w
    return pair


def metzler_diag_bound(A, B, witness: InfeasibilityWitness):
    """Per-index bound ruling out witnesses for Metzler / nonnegative pairs.

    Returns (lhs, rhs) with lhs_i = (A H11 + B H12^T)_ii and
    rhs_i = g_i ((A+B) g)_i where g_i = sqrt((H11)_ii).  For A Metzler,
    B >= 0 and PSD H with diag(H22) <= diag(H11), lhs <= rhs entrywise; when
    A + B is Hurwitz the right side has a negative entry, so no witness
    survives.  Intended as a test oracle.
    """
    A, B = _checked_pair(A, B)
    if witness.n != A.shape[0]:
        raise DimensionError(f"witness has size {witness.n}, matrices have size {A.shape[0]}")
    lhs = np.einsum("ij,ji->i", A, witness.h11) + np.einsum("ij,ij->i", B, witness.h12)
    g = np.sqrt(np.clip(np.diag(witness.h11), 0.0, None))
    rhs = g * ((A + B) @ g)
    return lhs, rhs
