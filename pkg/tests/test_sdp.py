"""SDP solver: examples, verification, embedding, dump/restore."""

import numpy as np
import pytest

from freespec import linalg, sdp
from freespec.linalg import SIGMA_X, SIGMA_Z, HermitianMatrix


def feasibility(blocks, constraints):
    return sdp.SdpProblem.make(blocks, constraints)


class TestSolveExamples:
    def test_minimize_spectral_bound(self):
        # min t s.t. t*I - sigma_x >= 0, in standard primal form via
        # X = t*I - sigma_x: optimum t = lambda_max(sigma_x) = 1
        p = sdp.SdpProblem.make(
            [2],
            [
                (([[1, 0], [0, -1]],), 0.0),     # X00 = X11
                (([[0, 1], [1, 0]],), -2.0),     # 2 Re X01 = -2
                (([[0, 1j], [-1j, 0]],), 0.0),   # 2 Im X01 = 0
            ],
            objective=([[1, 0], [0, 0]],),
        )
        out = sdp.solve(p)
        assert out.status is sdp.SdpStatus.OPTIMAL
        assert out.objective_value == pytest.approx(1.0, abs=1e-7)

    def test_infeasible_expectation(self):
        p = feasibility([2], [((np.eye(2),), 1.0), ((SIGMA_Z,), 2.0)])
        out = sdp.solve(p)
        assert out.status is sdp.SdpStatus.INFEASIBLE
        assert out.dual_certificate is not None
        assert sdp.verify(out, p).ok

    def test_feasible_expectation(self):
        p = feasibility([2], [((np.eye(2),), 1.0), ((SIGMA_Z,), 0.0)])
        out = sdp.solve(p)
        assert out.status is sdp.SdpStatus.FEASIBLE
        x = out.primal[0].mat
        assert np.trace(x).real == pytest.approx(1.0, abs=1e-7)
        assert abs(np.trace(SIGMA_Z.mat @ x)) < 1e-7
        # the maximally mixed point is among valid answers
        assert linalg.min_eigenvalue(out.primal[0]) > -1e-9


class TestVerify:
    def test_exact_primal_zero_residual(self):
        p = feasibility([2], [((np.eye(2),), 1.0)])
        out = sdp.SdpOutcome(
            status=sdp.SdpStatus.FEASIBLE, primal=(HermitianMatrix(np.eye(2) / 2),)
        )
        rep = sdp.verify(out, p)
        assert rep.ok
        assert rep.max_residual == pytest.approx(0.0, abs=1e-15)

    def test_infeasible_certificate_validates(self):
        p = feasibility([2], [((np.eye(2),), 1.0), ((SIGMA_Z,), 2.0)])
        out = sdp.solve(p)
        rep = sdp.verify(out, p)
        assert rep.ok
        assert rep.farkas_gap > 0
        assert rep.farkas_lambda_max <= 1e-7 * rep.farkas_gap

    def test_tampered_primal_flagged(self):
        p = feasibility([2], [(([[1, 0], [0, 0]],), 0.9)])
        bad = HermitianMatrix(np.diag([0.9, -0.1]))
        out = sdp.SdpOutcome(status=sdp.SdpStatus.FEASIBLE, primal=(bad,))
        rep = sdp.verify(out, p)
        assert not rep.ok
        assert rep.psd_margin == pytest.approx(-0.1, abs=1e-12)


class TestRoundTripInvariant:
    def test_random_feasible_outcomes_verify(self):
        rng = np.random.default_rng(12)
        for _ in range(15):
            blocks = [int(rng.integers(2, 6))]
            n = blocks[0]
            m = int(rng.integers(1, min(8, n * n)))
            amats = [linalg.random_hermitian(rng, n) for _ in range(m)]
            x0 = linalg.random_psd(rng, n)
            cons = [((a,), linalg.trace_inner(x0, a)) for a in amats]
            p = feasibility(blocks, cons)
            out = sdp.solve(p)
            assert out.status is sdp.SdpStatus.FEASIBLE
            rep = sdp.verify(out, p)
            assert rep.ok
            assert rep.max_residual < 1e-6


class TestDualityGap:
    def test_optimal_gap_small(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            n, m = 4, 5
            amats = [linalg.random_hermitian(rng, n) for _ in range(m)]
            # primal-dual pair with complementary optimum
            w, u = np.linalg.eigh(linalg.random_hermitian(rng, n).mat)
            x0 = HermitianMatrix((u[:, :2] * np.abs(rng.standard_normal(2))) @ u[:, :2].conj().T)
            s0 = HermitianMatrix((u[:, 2:] * np.abs(rng.standard_normal(2))) @ u[:, 2:].conj().T)
            y0 = rng.standard_normal(m)
            c = HermitianMatrix(sum(yi * a.mat for yi, a in zip(y0, amats)) + s0.mat)
            cons = [((a,), linalg.trace_inner(x0, a)) for a in amats]
            p = sdp.SdpProblem.make([n], cons, objective=(c,))
            out = sdp.solve(p)
            assert out.status is sdp.SdpStatus.OPTIMAL
            expected = linalg.trace_inner(x0, c)
            assert out.objective_value == pytest.approx(expected, abs=1e-6 * (1 + abs(expected)))
            # primal-dual duality gap at the returned multipliers
            dual_obj = float(out.y @ np.array([c_.rhs for c_ in p.constraints]))
            assert abs(out.objective_value - dual_obj) < 1e-6 * (1 + abs(out.objective_value))


class TestComplexEmbedding:
    def test_real_doubling_preserves_objective(self):
        # solving the explicitly doubled real problem gives exactly twice
        # the complex objective value (inner products double)
        rng = np.random.default_rng(14)
        for trial in range(10):
            n, m = 3, 4
            amats = [linalg.random_hermitian(rng, n) for _ in range(m)]
            x0 = linalg.random_psd(rng, n)
            s0 = linalg.random_psd(rng, n)
            y0 = rng.standard_normal(m)
            c = HermitianMatrix(sum(yi * a.mat for yi, a in zip(y0, amats)) + s0.mat)
            cons = [((a,), linalg.trace_inner(x0, a)) for a in amats]
            p = sdp.SdpProblem.make([n], cons, objective=(c,))
            out = sdp.solve(p)
            assert out.status is sdp.SdpStatus.OPTIMAL

            def emb(h):
                return np.block(
                    [[h.mat.real, -h.mat.imag], [h.mat.imag, h.mat.real]]
                )

            cons2 = [((emb(a),), 2.0 * linalg.trace_inner(x0, a)) for a in amats]
            p2 = sdp.SdpProblem.make([2 * n], cons2, objective=(emb(c),))
            out2 = sdp.solve(p2)
            assert out2.status is sdp.SdpStatus.OPTIMAL
            assert out2.objective_value / 2.0 == pytest.approx(
                out.objective_value, abs=1e-6 * (1 + abs(out.objective_value))
            )


class TestInconsistentConstraints:
    def test_conflicting_dependent_rows_infeasible_with_certificate(self):
        # duplicated row with different rhs: linear inconsistency doubles as
        # a Farkas certificate
        p = feasibility([2], [((np.eye(2),), 1.0), ((np.eye(2),), 2.0)])
        out = sdp.solve(p)
        assert out.status is sdp.SdpStatus.INFEASIBLE
        assert sdp.verify(out, p).ok

    def test_consistent_dependent_rows_ok(self):
        p = feasibility(
            [2],
            [((np.eye(2),), 1.0), ((2 * np.eye(2),), 2.0), ((SIGMA_Z,), 0.0)],
        )
        out = sdp.solve(p)
        assert out.status is sdp.SdpStatus.FEASIBLE


class TestMultiBlock:
    def test_blocks_with_gaps(self):
        # second block unconstrained; coefficient None marks a zero block
        p = sdp.SdpProblem.make(
            [2, 3],
            [((np.eye(2), None), 1.0), ((SIGMA_X, None), 1.0)],
        )
        out = sdp.solve(p)
        assert out.status is sdp.SdpStatus.FEASIBLE
        assert sdp.verify(out, p).ok


class TestDumpRestore:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(15)
        amats = [linalg.random_hermitian(rng, 3) for _ in range(3)]
        obj = linalg.random_hermitian(rng, 2)
        p = sdp.SdpProblem.make(
            [3, 2],
            [((a, None), float(rng.standard_normal())) for a in amats],
            objective=(None, obj),
        )
        path = tmp_path / "problem.sdpa"
        sdp.dump_problem(p, path)
        q = sdp.load_problem(path)
        assert q.blocks == p.blocks
        assert len(q.constraints) == len(p.constraints)
        for cp, cq in zip(p.constraints, q.constraints):
            assert cq.rhs == cp.rhs
            assert np.array_equal(cq.coeffs[0].mat, cp.coeffs[0].mat)
            assert cq.coeffs[1] is None
        assert np.array_equal(q.objective[1].mat, p.objective[1].mat)
        assert q.objective[0] is None

    def test_feasibility_dump_no_objective(self, tmp_path):
        p = feasibility([2], [((np.eye(2),), 1.0)])
        path = tmp_path / "feas.sdpa"
        sdp.dump_problem(p, path)
        q = sdp.load_problem(path)
        assert q.objective is None


class TestValidation:
    def test_block_dim_mismatch(self):
        with pytest.raises(ValueError, match="dim"):
            sdp.SdpProblem.make([3], [((np.eye(2),), 1.0)])

    def test_positive_blocks(self):
        with pytest.raises(ValueError, match="positive"):
            sdp.SdpProblem.make([0], [])
