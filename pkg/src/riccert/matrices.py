"""Matrix predicates and constructions for Metzler matrices.

All definiteness and Hurwitz tests share a single absolute tolerance on
eigenvalue real parts (``DEFAULT_TOL``).  Ties at the tolerance count as
failures, so stability claims stay conservative.  Definiteness goes through a
symmetric eigensolve rather than a Cholesky attempt so the margin (the largest
eigenvalue) is available to callers as a reusable quantity.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DimensionError,
    EigensolveError,
    NoPositiveVector,
    PreconditionError,
    VerificationError,
)

__all__ = [
    "DEFAULT_TOL",
    "as_square",
    "as_vector",
    "eigmax_sym",
    "is_metzler",
    "is_nonnegative",
    "is_hurwitz",
    "is_negative_definite",
    "metzler_positive_vector",
    "metzler_diagonal_lyapunov",
    "negative_product_index",
]

DEFAULT_TOL = 1e-9


def as_square(A, name: str = "matrix") -> np.ndarray:
    """Coerce to a float square matrix with finite entries."""
    M = np.asarray(A, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise DimensionError(f"{name} must be square and nonempty, got shape {M.shape}")
    if not np.isfinite(M).all():
        raise ValueError(f"{name} must have finite entries")
    return M


def as_vector(v, n: int | None = None, name: str = "vector") -> np.ndarray:
    """Coerce to a 1-d float vector, optionally of length ``n``."""
    w = np.asarray(v, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise DimensionError(f"{name} must be a nonempty 1-d vector, got shape {w.shape}")
    if n is not None and w.size != n:
        raise DimensionError(f"{name} must have length {n}, got {w.size}")
    if not np.isfinite(w).all():
        raise ValueError(f"{name} must have finite entries")
    return w


def eigmax_sym(S) -> float:
    """Largest eigenvalue of the symmetric part of ``S``."""
    M = as_square(S, "S")
    M = 0.5 * (M + M.T)
    try:
        return float(np.linalg.eigvalsh(M)[-1])
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigensolveError(f"symmetric eigensolve failed: {exc}") from exc


def is_metzler(A, tol: float = DEFAULT_TOL) -> bool:
    """True iff all off-diagonal entries are >= -tol."""
    M = as_square(A, "A")
    off = M - np.diag(np.diag(M))
    return bool((off >= -tol).all())


def is_nonnegative(A, tol: float = DEFAULT_TOL) -> bool:
    """True iff all entries are >= -tol."""
    M = as_square(A, "A")
    return bool((M >= -tol).all())


def is_hurwitz(A, tol: float = DEFAULT_TOL) -> bool:
    """True iff every eigenvalue has real part < -tol.

    An eigensolver failure raises ``EigensolveError`` instead of returning
    False, so a numerical breakdown is never mistaken for instability.
    """
    M = as_square(A, "A")
    try:
        eig = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise EigensolveError(f"eigensolve failed: {exc}") from exc
    return bool(np.max(eig.real) < -tol)


def is_negative_definite(S, tol: float = DEFAULT_TOL) -> bool:
    """True iff the symmetrized matrix has largest eigenvalue < -tol.

    ``S`` must be symmetric within ``tol`` entrywise; it is symmetrized before
    the eigensolve so rounding noise in the input cannot flip the answer.
    """
    M = as_square(S, "S")
    if np.max(np.abs(M - M.T)) > tol:
        raise ValueError("matrix is not symmetric within tolerance")
    return eigmax_sym(M) < -tol


def metzler_positive_vector(A) -> np.ndarray:
    """Solve A v = -1 and verify v >> 0 and A v << 0.

    For a Metzler Hurwitz matrix this produces a strictly positive vector with
    strictly negative image.  If verification fails (A not Metzler-Hurwitz, or
    singular) a ``NoPositiveVector`` error is raised; the construction is never
    silently trusted.
    """
    M = as_square(A, "A")
    ones = np.ones(M.shape[0])
    try:
        v = np.linalg.solve(M, -ones)
    except np.linalg.LinAlgError as exc:
        raise NoPositiveVector("no positive vector: matrix is singular") from exc
    image = M @ v
    if not (v > 0.0).all():
        raise NoPositiveVector(f"no positive vector: solve(A v = -1) gave min v = {v.min():.6g}")
    if not (image < 0.0).all():
        raise NoPositiveVector("no positive vector: A v is not strictly negative")
    return v


def metzler_diagonal_lyapunov(A) -> np.ndarray:
    """Diagonal d > 0 with A^T D + D A negative definite, for Metzler Hurwitz A.

    Construction: v solves A v = -1, u solves A^T u = -1, d_i = u_i / v_i.
    The result is verified with the definiteness test before returning;
    failure of that check raises ``VerificationError`` (a bug, since the
    construction is guaranteed for Metzler Hurwitz input).
    """
    M = as_square(A, "A")
    if not is_metzler(M):
        raise PreconditionError("matrix is not Metzler (negative off-diagonal entry)")
    v = metzler_positive_vector(M)
    u = metzler_positive_vector(M.T)
    d = u / v
    lyap = M.T * d[None, :] + d[:, None] * M
    if not is_negative_definite(lyap):
        raise VerificationError("constructed diagonal Lyapunov solution failed verification")
    return d


def negative_product_index(A, v) -> int:
    """Smallest index i with v_i (A v)_i < 0.

    For a Metzler Hurwitz matrix such an index exists for every nonzero v.
    Raises ``PreconditionError`` when no index qualifies.
    """
    M = as_square(A, "A")
    w = as_vector(v, M.shape[0], "v")
    products = w * (M @ w)
    for i, value in enumerate(products):
        if value < 0.0:
            return i
    raise PreconditionError("no index with v_i (A v)_i < 0; input violates preconditions")
