"""Infeasibility witnesses and the triangular-pair dichotomy.

A pair (A, B) admits no diagonal Riccati certificate exactly when some
nonzero positive semidefinite block matrix H = [[H11, H12], [H12^T, H22]]
with diag(H11) >= diag(H22) makes every diagonal entry of
A H11 + B H12^T nonnegative.  Such an H is an infeasibility witness.

For jointly triangular pairs, feasibility reduces to a diagonal test
(a_ii < 0 and |b_ii| < |a_ii| for every i) and an explicit rank-one witness
exists whenever the test fails.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InvalidWitness, NotTriangular, PreconditionError
from .matrices import DEFAULT_TOL, as_square

__all__ = [
    "InfeasibilityWitness",
    "witness_diagonal",
    "witness_min_diag",
    "verify_witness",
    "triangular_orientation",
    "triangular_decision",
    "triangular_witness",
]


@dataclass
class InfeasibilityWitness:
    """Blocks of a candidate witness H = [[h11, h12], [h12^T, h22]]."""

    h11: np.ndarray
    h12: np.ndarray
    h22: np.ndarray

    def __post_init__(self):
        self.h11 = as_square(self.h11, "H11")
        self.h12 = as_square(self.h12, "H12")
        self.h22 = as_square(self.h22, "H22")
        if not (self.h11.shape == self.h12.shape == self.h22.shape):
            raise DimensionError("witness blocks must share one square shape")

    @property
    def n(self) -> int:
        return self.h11.shape[0]

    def assemble(self) -> np.ndarray:
        n = self.n
        H = np.empty((2 * n, 2 * n))
        H[:n, :n] = self.h11
        H[:n, n:] = self.h12
        H[n:, :n] = self.h12.T
        H[n:, n:] = self.h22
        return H

    def validate(self, psd_tol: float = 1e-9, diag_tol: float = 1e-12):
        """Check the structural invariants; raise ``InvalidWitness`` otherwise.

        Invariants: h11/h22 symmetric, assembled H positive semidefinite
        (lambda_min >= -psd_tol), H nonzero, and diag(h11) >= diag(h22)
        entrywise within diag_tol.
        """
        scale = max(1.0, float(max(np.max(np.abs(self.h11)), np.max(np.abs(self.h22)))))
        if np.max(np.abs(self.h11 - self.h11.T)) > psd_tol * scale:
            raise InvalidWitness("H11 is not symmetric")
        if np.max(np.abs(self.h22 - self.h22.T)) > psd_tol * scale:
            raise InvalidWitness("H22 is not symmetric")
        H = self.assemble()
        if not np.any(H):
            raise InvalidWitness("witness is the zero matrix")
        lam_min = float(np.linalg.eigvalsh(0.5 * (H + H.T))[0])
        if lam_min < -psd_tol:
            raise InvalidWitness(f"witness is not positive semidefinite (lambda_min = {lam_min:.6g})")
        deficit = np.diag(self.h22) - np.diag(self.h11)
        if np.max(deficit) > diag_tol:
            raise InvalidWitness(
                f"diag(H11) >= diag(H22) violated by {float(np.max(deficit)):.6g}"
            )


def _checked(A, B, witness: InfeasibilityWitness):
    A = as_square(A, "A")
    B = as_square(B, "B")
    if A.shape != B.shape:
        raise DimensionError(f"A and B must have the same shape, got {A.shape} and {B.shape}")
    if witness.n != A.shape[0]:
        raise DimensionError(f"witness has size {witness.n}, matrices have size {A.shape[0]}")
    return A, B


def witness_diagonal(A, B, witness: InfeasibilityWitness) -> np.ndarray:
    """diag(A H11 + B H12^T), the quantity a witness must keep nonnegative."""
    A, B = _checked(A, B, witness)
    return np.einsum("ij,ji->i", A, witness.h11) + np.einsum("ij,ij->i", B, witness.h12)


def witness_min_diag(A, B, witness: InfeasibilityWitness) -> float:
    return float(np.min(witness_diagonal(A, B, witness)))


def verify_witness(
    A, B, witness: InfeasibilityWitness, tol: float = DEFAULT_TOL, strict: bool = False
) -> bool:
    """True iff the witness refutes every certificate for (A, B).

    The structural invariants are validated first (``InvalidWitness`` is
    raised on violation, distinct from a plain False).  The check itself is
    min_i diag(A H11 + B H12^T)_i >= -tol; with ``strict=True`` the minimum
    must clear +tol, the margin used for search-produced witnesses where
    exact arithmetic is not available.
    """
    A, B = _checked(A, B, witness)
    witness.validate()
    m = witness_min_diag(A, B, witness)
    return m >= tol if strict else m >= -tol


def _is_lower(M: np.ndarray, tol: float) -> bool:
    if M.shape[0] == 1:
        return True
    return float(np.max(np.abs(np.triu(M, 1)))) <= tol


def triangular_orientation(A, B, tol: float = DEFAULT_TOL) -> str | None:
    """'lower' or 'upper' when both matrices share that triangular shape,
    else None.  Diagonal pairs report 'lower'."""
    A = as_square(A, "A")
    B = as_square(B, "B")
    if A.shape != B.shape:
        raise DimensionError(f"A and B must have the same shape, got {A.shape} and {B.shape}")
    if _is_lower(A, tol) and _is_lower(B, tol):
        return "lower"
    if _is_lower(A.T, tol) and _is_lower(B.T, tol):
        return "upper"
    return None


def triangular_decision(A, B, tol: float = DEFAULT_TOL) -> bool:
    """Decide certificate existence for a jointly triangular pair.

    True iff a_ii < -tol and |b_ii| < |a_ii| - tol for every i.  The boundary
    |b_ii| = |a_ii| is classified infeasible; ``triangular_witness`` covers it
    with an exact witness.  Raises ``NotTriangular`` for other pairs.
    """
    A = as_square(A, "A")
    B = as_square(B, "B")
    if triangular_orientation(A, B, tol) is None:
        raise NotTriangular("pair is not jointly lower or jointly upper triangular")
    a = np.diag(A)
    b = np.diag(B)
    return bool((a < -tol).all() and (np.abs(b) < np.abs(a) - tol).all())


def triangular_witness(A, B, tol: float = DEFAULT_TOL) -> InfeasibilityWitness:
    """Exact rank-one witness for an infeasible jointly triangular pair.

    If some a_ii >= 0, the witness is H11 = e_i e_i^T with zero other blocks
    (smallest such i).  Otherwise the smallest i with |b_ii| >= |a_ii| gives
    H11 = H22 = e_i e_i^T and H12 = sign(b_ii) e_i e_i^T with sign(0) := +1;
    the tested diagonal entry is then a_ii + |b_ii| >= 0 exactly.  Raises
    ``PreconditionError`` when no index violates the decision (stable pair or
    a failure purely inside the tolerance band).
    """
    A = as_square(A, "A")
    B = as_square(B, "B")
    if triangular_orientation(A, B, tol) is None:
        raise NotTriangular("pair is not jointly lower or jointly upper triangular")
    n = A.shape[0]
    a = np.diag(A)
    b = np.diag(B)

    def unit(i):
        E = np.zeros((n, n))
        E[i, i] = 1.0
        return E

    for i in range(n):
        if a[i] >= 0.0:
            return InfeasibilityWitness(unit(i), np.zeros((n, n)), np.zeros((n, n)))
    for i in range(n):
        if abs(b[i]) >= abs(a[i]):
            sign = 1.0 if b[i] >= 0.0 else -1.0
            E = unit(i)
            return InfeasibilityWitness(E, sign * E, E)
    raise PreconditionError("no violating index: the triangular pair admits a certificate")
