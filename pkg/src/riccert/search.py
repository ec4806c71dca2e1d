"""Numerical search for certificates and witnesses, and the combined decision.

Certificate search: parametrize p = exp(theta), q = exp(phi) (positivity for
free) and run subgradient descent on lambda_max(S).  At a unit top eigenvector
u = (x, y) the subgradient is u^T (dS/d param) u, i.e.

    d lambda / d p_i = 2 x_i ((A x)_i + (B y)_i),
    d lambda / d q_i = x_i^2 - y_i^2,

scaled by p_i / q_i for the log parameters.  S is jointly homogeneous in
(p, q), so iterates are renormalized to max(p, q) = 1 each iteration; a
candidate is accepted once lambda_max <= -cert_margin and is then re-verified
exactly.

Witness search: parametrize H = L L^T (L lower triangular, trace-normalized)
and run subgradient ascent on

    min_i (A H11 + B H12^T)_ii  -  penalty * sum_i max(0, (H22)_ii - (H11)_ii),

accepting when the min diagonal clears +witness_margin with the diagonal
constraint satisfied within 1e-12, again re-verified before returning.

Both searches are multistart with a deterministic generator per restart
(seed XOR restart index), so identical inputs and options give identical
results regardless of how restarts are scheduled.  Neither search is complete;
``decide`` reports Unknown when the budget runs out without an answer.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .certificates import DiagonalPair, RiccatiCertificate, _block, verify_certificate
from .errors import InvalidWitness, NotNegativeDefinite
from .matrices import as_square, is_hurwitz, is_metzler, is_nonnegative
from .synthesis import synthesize
from .witnesses import (
    InfeasibilityWitness,
    NotTriangular,
    triangular_decision,
    triangular_orientation,
    triangular_witness,
    verify_witness,
)

__all__ = [
    "SearchOptions",
    "Verdict",
    "DecisionResult",
    "search_certificate",
    "search_witness",
    "decide",
]

_SEED_MASK = 0xFFFFFFFFFFFFFFFF
_STEP_FLOOR = 1e-14


@dataclass
class SearchOptions:
    restarts: int = 16
    max_iters: int = 500
    cert_margin: float = 1e-7
    witness_margin: float = 1e-7
    rng_seed: int = 0
    step_init: float = 0.5

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be at least 1")
        if not (self.cert_margin > 0.0 and self.witness_margin > 0.0 and self.step_init > 0.0):
            raise ValueError("margins and step_init must be positive")


class Verdict(str, Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    UNKNOWN = "unknown"


@dataclass
class DecisionResult:
    verdict: Verdict
    certificate: RiccatiCertificate | None = None
    witness: InfeasibilityWitness | None = None
    diagnostics: dict = field(default_factory=dict)


def _restart_rng(opts: SearchOptions, index: int) -> np.random.Generator:
    return np.random.default_rng((opts.rng_seed ^ index) & _SEED_MASK)


def _checked_pair(A, B):
    A = as_square(A, "A")
    B = as_square(B, "B")
    if A.shape != B.shape:
        raise ValueError(f"A and B must have the same shape, got {A.shape} and {B.shape}")
    return A, B


def _cert_restart(A, B, opts: SearchOptions, index: int, callback=None):
    """One descent run.  Returns (best lambda seen, DiagonalPair or None)."""
    n = A.shape[0]
    rng = _restart_rng(opts, index)
    theta = rng.uniform(-1.0, 1.0, n)
    phi = rng.uniform(-1.0, 1.0, n)

    def normalize(th, ph):
        shift = max(th.max(), ph.max())
        return th - shift, ph - shift

    def lam_of(th, ph):
        S = _block(A, B, np.exp(th), np.exp(ph))
        return float(np.linalg.eigvalsh(S)[-1])

    theta, phi = normalize(theta, phi)
    best = np.inf
    lam = None
    for iteration in range(opts.max_iters):
        p = np.exp(theta)
        q = np.exp(phi)
        S = _block(A, B, p, q)
        evals, evecs = np.linalg.eigh(S)
        lam = float(evals[-1])
        best = min(best, lam)
        if lam <= -opts.cert_margin:
            return best, DiagonalPair(p, q)
        u = evecs[:, -1]
        x, y = u[:n], u[n:]
        grad_p = 2.0 * x * (A @ x + B @ y)
        grad_q = x * x - y * y
        grad = np.concatenate([p * grad_p, q * grad_q])
        norm = float(np.linalg.norm(grad))
        if norm < 1e-16:
            break
        direction = grad / norm
        step = opts.step_init
        moved = False
        while step >= _STEP_FLOOR:
            theta_new, phi_new = normalize(theta - step * direction[:n], phi - step * direction[n:])
            if lam_of(theta_new, phi_new) < lam:
                theta, phi = theta_new, phi_new
                moved = True
                break
            step *= 0.5
        if not moved:
            break  # no descent direction left at this kink: local minimum
        if callback is not None:
            callback(index, iteration, theta.copy(), phi.copy())
    lam = lam_of(theta, phi)
    best = min(best, lam)
    if lam <= -opts.cert_margin:
        return best, DiagonalPair(np.exp(theta), np.exp(phi))
    return best, None


def _witness_from_blocks(H: np.ndarray, n: int) -> InfeasibilityWitness:
    return InfeasibilityWitness(H[:n, :n].copy(), H[:n, n:].copy(), H[n:, n:].copy())


def _wit_restart(A, B, opts: SearchOptions, index: int):
    """One ascent run.  Returns (best objective seen, witness or None)."""
    n = A.shape[0]
    m2 = 2 * n
    rng = _restart_rng(opts, index)
    L = np.eye(m2) + np.tril(rng.uniform(-0.1, 0.1, (m2, m2)))
    penalty = 10.0 * max(1.0, float(np.max(np.abs(A))), float(np.max(np.abs(B))))

    def evaluate(Lmat):
        Lnorm = Lmat / np.linalg.norm(Lmat)  # trace(H) = ||L||_F^2 = 1
        H = Lnorm @ Lnorm.T
        diag = np.einsum("ij,ji->i", A, H[:n, :n]) + np.einsum("ij,ij->i", B, H[:n, n:])
        deficit = np.diag(H)[n:] - np.diag(H)[:n]
        objective = float(diag.min()) - penalty * float(np.clip(deficit, 0.0, None).sum())
        return objective, Lnorm, H, diag, deficit

    best = -np.inf
    for _ in range(opts.max_iters):
        objective, L, H, diag, deficit = evaluate(L)
        best = max(best, objective)
        if diag.min() >= opts.witness_margin and deficit.max() <= 1e-12:
            witness = _witness_from_blocks(H, n)
            try:
                if verify_witness(A, B, witness, tol=opts.witness_margin, strict=True):
                    return best, witness
            except InvalidWitness:
                pass  # rounding pushed an invariant over the line; keep searching
        # Subgradient of the objective in H at the active min index and the
        # active penalty rows, pulled back through H = L L^T as (G + G^T) L:
        # (A H11 + B H12^T)_ii depends on H[j, i] with weight a_ij and on
        # H[i, n+j] with weight b_ij; an active penalty row contributes
        # +penalty at (H11)_ii and -penalty at (H22)_ii.
        i_star = int(np.argmin(diag))
        G = np.zeros((m2, m2))
        G[:n, i_star] += A[i_star, :]
        G[i_star, n:] += B[i_star, :]
        idx = np.flatnonzero(deficit > 0.0)
        G[idx, idx] += penalty
        G[idx + n, idx + n] -= penalty
        D = np.tril((G + G.T) @ L)
        norm = float(np.linalg.norm(D))
        if norm < 1e-16:
            break
        D /= norm
        step = opts.step_init
        moved = False
        while step >= _STEP_FLOOR:
            candidate, *_ = evaluate(L + step * D)
            if candidate > objective:
                L = L + step * D
                moved = True
                break
            step *= 0.5
        if not moved:
            break
    objective, L, H, diag, deficit = evaluate(L)
    best = max(best, objective)
    if diag.min() >= opts.witness_margin and deficit.max() <= 1e-12:
        witness = _witness_from_blocks(H, n)
        try:
            if verify_witness(A, B, witness, tol=opts.witness_margin, strict=True):
                return best, witness
        except InvalidWitness:
            pass
    return best, None


def search_certificate(A, B, opts: SearchOptions | None = None, callback=None):
    """Multistart certificate search.

    Returns (certificate, best_per_restart); the certificate is None when the
    budget is exhausted, in which case the diagnostics carry the best
    lambda_max reached by each restart that ran.
    """
    A, B = _checked_pair(A, B)
    opts = opts or SearchOptions()
    bests: list[float] = []
    for k in range(opts.restarts):
        best, pair = _cert_restart(A, B, opts, k, callback)
        bests.append(best)
        if pair is not None:
            return verify_certificate(A, B, pair), bests
    return None, bests


def search_witness(A, B, opts: SearchOptions | None = None):
    """Multistart witness search; returns (witness or None, best_per_restart)."""
    A, B = _checked_pair(A, B)
    opts = opts or SearchOptions()
    bests: list[float] = []
    for k in range(opts.restarts):
        best, witness = _wit_restart(A, B, opts, k)
        bests.append(best)
        if witness is not None:
            return witness, bests
    return None, bests


def _metzler_infeasible_witness(A, B):
    """Witness for a Metzler / nonnegative pair whose sum is not Hurwitz.

    The dominant eigenvalue of the Metzler matrix A + B is real with a
    nonnegative eigenvector g; H11 = H12 = H22 = g g^T gives diagonal entries
    mu * g_i^2 >= 0.  Returns None if the numerical eigenvector does not
    survive verification.
    """
    M = A + B
    try:
        evals, evecs = np.linalg.eig(M)
    except np.linalg.LinAlgError:
        return None
    g = np.real(evecs[:, int(np.argmax(evals.real))])
    pivot = g[int(np.argmax(np.abs(g)))]
    if pivot == 0.0:
        return None
    g = np.clip(g * np.sign(pivot), 0.0, None)
    norm = float(np.linalg.norm(g))
    if norm == 0.0:
        return None
    g /= norm
    G = np.outer(g, g)
    witness = InfeasibilityWitness(G, G, G)
    try:
        if verify_witness(A, B, witness):
            return witness
    except InvalidWitness:
        return None
    return None


def decide(A, B, opts: SearchOptions | None = None, jobs: int = 1) -> DecisionResult:
    """Decide diagonal Riccati stability of (A, B).

    Structured fast paths first: Metzler/nonnegative pairs are decided exactly
    through the Hurwitz test on A + B (with constructive synthesis or an
    eigenvector witness), jointly triangular pairs through the diagonal test
    (with the exact rank-one witness).  Remaining pairs run the certificate
    and witness searches interleaved by restart.  Search incompleteness means
    an exhausted budget yields Verdict.UNKNOWN, never a stability claim.

    ``jobs > 1`` evaluates restarts concurrently; results are merged in
    restart order, so the outcome is identical to the sequential run.
    """
    A, B = _checked_pair(A, B)
    opts = opts or SearchOptions()

    if is_metzler(A) and is_nonnegative(B):
        diagnostics = {"path": "metzler", "certificate": [], "witness": []}
        if is_hurwitz(A + B):
            pair = synthesize(A, B)
            cert = verify_certificate(A, B, pair)
            return DecisionResult(Verdict.STABLE, certificate=cert, diagnostics=diagnostics)
        witness = _metzler_infeasible_witness(A, B)
        if witness is None:
            witness, bests = search_witness(A, B, opts)
            diagnostics["witness"] = bests
        if witness is None:
            return DecisionResult(Verdict.UNKNOWN, diagnostics=diagnostics)
        return DecisionResult(Verdict.UNSTABLE, witness=witness, diagnostics=diagnostics)

    if triangular_orientation(A, B) is not None:
        diagnostics = {"path": "triangular", "certificate": [], "witness": []}
        if triangular_decision(A, B):
            cert, bests = search_certificate(A, B, opts)
            diagnostics["certificate"] = bests
            if cert is not None:
                return DecisionResult(Verdict.STABLE, certificate=cert, diagnostics=diagnostics)
            return DecisionResult(Verdict.UNKNOWN, diagnostics=diagnostics)
        witness = triangular_witness(A, B)
        return DecisionResult(Verdict.UNSTABLE, witness=witness, diagnostics=diagnostics)

    return _decide_by_search(A, B, opts, jobs)


def _decide_by_search(A, B, opts: SearchOptions, jobs: int) -> DecisionResult:
    if jobs > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
            cert_futures = [pool.submit(_cert_restart, A, B, opts, k) for k in range(opts.restarts)]
            wit_futures = [pool.submit(_wit_restart, A, B, opts, k) for k in range(opts.restarts)]
            cert_runs = [f.result() for f in cert_futures]
            wit_runs = [f.result() for f in wit_futures]
    else:
        cert_runs = None
        wit_runs = None

    cert_bests: list[float] = []
    wit_bests: list[float] = []
    diagnostics = {"path": "search", "certificate": cert_bests, "witness": wit_bests}
    for k in range(opts.restarts):
        best, pair = cert_runs[k] if cert_runs is not None else _cert_restart(A, B, opts, k)
        cert_bests.append(best)
        if pair is not None:
            cert = verify_certificate(A, B, pair)
            return DecisionResult(Verdict.STABLE, certificate=cert, diagnostics=diagnostics)
        best_w, witness = wit_runs[k] if wit_runs is not None else _wit_restart(A, B, opts, k)
        wit_bests.append(best_w)
        if witness is not None:
            return DecisionResult(Verdict.UNSTABLE, witness=witness, diagnostics=diagnostics)
    return DecisionResult(Verdict.UNKNOWN, diagnostics=diagnostics)
