"""Multistart searches and the combined decision procedure."""

import numpy as np
import pytest

from riccert import (
    SearchOptions,
    Verdict,
    decide,
    search_certificate,
    search_witness,
    verify_certificate,
    verify_witness,
    witness_diagonal,
)

A_HARD = np.array([[-1.0, 0.0], [-2.0, -1.0]])
B_HARD = np.diag([-10.0, -10.0])

SMALL = SearchOptions(restarts=6, max_iters=150)


class TestSearchOptions:
    def test_defaults(self):
        opts = SearchOptions()
        assert opts.restarts == 16 and opts.max_iters == 500

    def test_validation(self):
        with pytest.raises(ValueError):
            SearchOptions(restarts=0)
        with pytest.raises(ValueError):
            SearchOptions(cert_margin=0.0)
        with pytest.raises(ValueError):
            SearchOptions(step_init=-1.0)


class TestSearchCertificate:
    def test_finds_feasible_nonsymmetric(self):
        # brute-force feasibility oracle over a coarse log grid first,
        # assembled directly so the oracle is independent of riccati_block
        A = -np.eye(2)
        B = np.diag([0.9, -0.9])
        grid = 2.0 ** np.arange(-4, 5)
        feasible = False
        for p1 in grid:
            for p2 in grid:
                P = np.diag([p1, p2])
                for q1 in grid:
                    for q2 in grid:
                        Q = np.diag([q1, q2])
                        top = A.T @ P + P @ A + Q
                        S = np.block([[top, P @ B], [B.T @ P, -Q]])
                        if np.linalg.eigvalsh(S)[-1] < 0:
                            feasible = True
        assert feasible
        cert, bests = search_certificate(A, B, SMALL)
        assert cert is not None
        assert cert.lambda_max < 0
        assert len(bests) >= 1

    def test_none_for_infeasible(self):
        cert, bests = search_certificate(A_HARD, B_HARD, SMALL)
        assert cert is None
        assert len(bests) == SMALL.restarts
        assert min(bests) > -SMALL.cert_margin

    def test_callback_reports_normalized_iterates(self):
        # an infeasible pair keeps the descent running, so callbacks fire
        seen = []

        def cb(restart, iteration, theta, phi):
            seen.append((restart, iteration, theta, phi))

        search_certificate(A_HARD, B_HARD, SearchOptions(restarts=1, max_iters=30), callback=cb)
        assert seen
        for _, _, theta, phi in seen:
            assert abs(max(theta.max(), phi.max())) < 1e-15  # max(p, q) pinned at 1

    def test_found_certificates_verify(self):
        rng = np.random.default_rng(41)
        found = 0
        for _ in range(20):
            n = int(rng.integers(2, 5))
            M = rng.normal(size=(n, n))
            A = M - (np.abs(np.linalg.eigvals(M).real).max() + 1.0) * np.eye(n)
            B = 0.1 * rng.normal(size=(n, n))
            cert, _ = search_certificate(A, B, SMALL)
            if cert is not None:
                found += 1
                verify_certificate(A, B, cert.pair)
        assert found >= 15


class TestSearchWitness:
    def test_hard_pair_strict_witness(self):
        witness, bests = search_witness(A_HARD, B_HARD, SMALL)
        assert witness is not None
        assert verify_witness(A_HARD, B_HARD, witness, strict=True, tol=SMALL.witness_margin)
        assert witness_diagonal(A_HARD, B_HARD, witness).min() >= SMALL.witness_margin

    def test_none_for_stable_pair(self):
        A = np.array([[-2.0, 1.0], [1.0, -2.0]])
        witness, bests = search_witness(A, 0.5 * np.eye(2), SMALL)
        assert witness is None
        assert len(bests) == SMALL.restarts


class TestDecide:
    def test_hard_pair_unstable_via_triangular(self):
        result = decide(A_HARD, B_HARD, SMALL)
        assert result.verdict is Verdict.UNSTABLE
        assert result.diagnostics["path"] == "triangular"
        assert result.certificate is None
        assert verify_witness(A_HARD, B_HARD, result.witness, tol=0.0)

    def test_metzler_stable_path(self):
        A = np.array([[-2.0, 1.0], [1.0, -2.0]])
        result = decide(A, 0.5 * np.eye(2), SMALL)
        assert result.verdict is Verdict.STABLE
        assert result.diagnostics["path"] == "metzler"
        assert abs(result.certificate.lambda_max - (-0.5)) < 1e-12
        assert result.witness is None

    def test_metzler_unstable_has_witness(self):
        result = decide(-np.eye(2), 2.0 * np.eye(2), SMALL)
        assert result.verdict is Verdict.UNSTABLE
        assert result.diagnostics["path"] == "metzler"
        assert verify_witness(-np.eye(2), 2.0 * np.eye(2), result.witness)

    def test_search_path_stable(self):
        # dense with a negative off-diagonal entry: no structured path applies
        A = np.array([[-2.0, 0.3], [-0.4, -2.0]])
        B = np.array([[0.3, -0.1], [0.2, 0.3]])
        result = decide(A, B, SMALL)
        assert result.verdict is Verdict.STABLE
        assert result.diagnostics["path"] == "search"
        assert result.certificate.lambda_max < 0

    def test_diagonal_pair_takes_triangular_path(self):
        result = decide(-np.eye(2), np.diag([0.9, -0.9]), SMALL)
        assert result.verdict is Verdict.STABLE
        assert result.diagnostics["path"] == "triangular"

    def test_skew_pair_unknown(self):
        # no certificate exists (zero diagonal blocks force lambda_max > 0)
        # and no strict witness exists (trace pairing vanishes), so the honest
        # answer is Unknown
        A = np.array([[0.0, 1.0], [-1.0, 0.0]])
        result = decide(A, np.zeros((2, 2)), SearchOptions(restarts=3, max_iters=80))
        assert result.verdict is Verdict.UNKNOWN
        assert result.certificate is None and result.witness is None

    def test_verdict_exclusivity(self):
        rng = np.random.default_rng(42)
        for _ in range(10):
            A = rng.normal(size=(2, 2)) - 1.5 * np.eye(2)
            B = 0.5 * rng.normal(size=(2, 2))
            result = decide(A, B, SMALL)
            if result.verdict is Verdict.STABLE:
                assert result.certificate is not None and result.witness is None
            elif result.verdict is Verdict.UNSTABLE:
                assert result.witness is not None and result.certificate is None
            else:
                assert result.certificate is None and result.witness is None


class TestDeterminism:
    @staticmethod
    def _signature(result):
        parts = [result.verdict.value, repr(result.diagnostics)]
        if result.certificate is not None:
            parts.append(result.certificate.pair.p.tobytes())
            parts.append(result.certificate.pair.q.tobytes())
        if result.witness is not None:
            parts.append(result.witness.assemble().tobytes())
        return parts

    # a dense pair so the decision actually goes through the restart loop
    A_DENSE = np.array([[-1.5, 0.4, -0.1], [-0.3, -1.2, 0.2], [0.1, -0.2, -1.8]])
    B_DENSE = np.array([[0.2, -0.1, 0.0], [0.15, -0.2, 0.1], [0.0, 0.1, 0.25]])

    def test_repeat_runs_identical(self):
        r1 = decide(self.A_DENSE, self.B_DENSE, SMALL)
        r2 = decide(self.A_DENSE, self.B_DENSE, SMALL)
        assert r1.diagnostics["path"] == "search"
        assert self._signature(r1) == self._signature(r2)

    def test_jobs_do_not_change_result(self):
        r1 = decide(self.A_DENSE, self.B_DENSE, SMALL, jobs=1)
        r4 = decide(self.A_DENSE, self.B_DENSE, SMALL, jobs=4)
        assert self._signature(r1) == self._signature(r4)

    def test_seed_changes_search_trace(self):
        r1 = decide(self.A_DENSE, self.B_DENSE, SearchOptions(restarts=4, max_iters=150, rng_seed=1))
        r2 = decide(self.A_DENSE, self.B_DENSE, SearchOptions(restarts=4, max_iters=150, rng_seed=2))
        assert r1.verdict == r2.verdict  # answer agrees
        assert repr(r1.diagnostics) != repr(r2.diagnostics)  # trace differs
