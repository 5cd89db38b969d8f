import numpy as np
import pytest

from secrecy_opt.convex import (
    LogDetProblem,
    LogDetTerm,
    SdpProblem,
    deembed_hermitian,
    embed_hermitian,
    solve_logdet_max,
    solve_sdp,
)


class TestEmbedding:
    def test_roundtrip(self):
        rng = np.random.default_rng(0)
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        a = a + a.conj().T
        assert np.allclose(deembed_hermitian(embed_hermitian(a)), a)

    def test_preserves_eigenvalues(self):
        rng = np.random.default_rng(1)
        m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        a = m @ m.conj().T
        w = np.linalg.eigvalsh(a)
        we = np.linalg.eigvalsh(embed_hermitian(a))
        assert np.allclose(np.sort(np.repeat(w, 2)), np.sort(we))


class TestSolveSdp:
    def test_trace_max_with_lmi_cap(self):
        p = SdpProblem(
            block_shapes=[2], n_scalars=1,
            objective=lambda b, s: np.real(np.trace(b[0])),
            lmi_constraints=[lambda b, s: 2 * np.eye(2) - b[0]],
            eq_constraints=[lambda b, s: np.real(np.trace(b[0])) + s[0] - 3.0],
        )
        value, (blocks, scalars), status = solve_sdp(p)
        assert status == "optimal"
        assert value == pytest.approx(3.0, abs=1e-5)
        assert scalars[0] == pytest.approx(0.0, abs=1e-5)

    def test_infeasible(self):
        p = SdpProblem(
            block_shapes=[1], n_scalars=0,
            objective=lambda b, s: np.real(np.trace(b[0])),
            eq_constraints=[lambda b, s: np.real(np.trace(b[0])) + 1.0],
        )
        value, _, status = solve_sdp(p)
        assert status == "infeasible" and value == -np.inf

    def test_complex_beamforming(self):
        h = np.array([[1 + 2j, 3 - 1j]])
        p = SdpProblem(
            block_shapes=[2], n_scalars=0,
            objective=lambda b, s: np.real(h @ b[0] @ h.conj().T)[0, 0],
            ineq_constraints=[lambda b, s: np.real(np.trace(b[0])) - 1.0],
        )
        value, (blocks, _), status = solve_sdp(p)
        assert status == "optimal"
        assert value == pytest.approx(np.linalg.norm(h) ** 2, rel=1e-5)
        # optimum is rank-one along h^H
        w = np.linalg.eigvalsh(blocks[0])
        assert w[-2] / w[-1] < 1e-6

    def test_solution_is_psd(self):
        p = SdpProblem(
            block_shapes=[2], n_scalars=0,
            objective=lambda b, s: np.real(b[0][0, 1] + b[0][1, 0]),
            ineq_constraints=[lambda b, s: np.real(np.trace(b[0])) - 1.0],
        )
        _, (blocks, _), status = solve_sdp(p)
        assert status == "optimal"
        assert np.linalg.eigvalsh(blocks[0])[0] >= -1e-7


class TestLogDetMax:
    def test_waterfilling_single_block(self):
        h = np.diag([2.0, 1.0]).astype(complex)
        prob = LogDetProblem(
            block_shapes=[2],
            logdet_terms=[LogDetTerm(base=np.eye(2), factors={0: h})],
            trace_budget=1.0,
        )
        value, blocks, meta = solve_logdet_max(prob, tol=1e-10)
        # water level mu solves (mu - 1/4) + (mu - 1) = 1
        expect = np.log(1 + 4 * 0.875) + np.log(1 + 0.125)
        assert value == pytest.approx(expect, abs=1e-6)
        assert meta["converged"]

    def test_joint_budget_two_blocks(self):
        prob = LogDetProblem(
            block_shapes=[1, 1],
            logdet_terms=[
                LogDetTerm(base=np.eye(1), factors={0: np.eye(1)}),
                LogDetTerm(base=np.eye(1), factors={1: 2 * np.eye(1)}),
            ],
            trace_budget=1.0,
        )
        value, blocks, _ = solve_logdet_max(prob, tol=1e-12)
        assert blocks[0].real.item() == pytest.approx(0.125, abs=1e-4)
        assert blocks[1].real.item() == pytest.approx(0.875, abs=1e-4)

    def test_linear_penalty_drives_to_zero(self):
        prob = LogDetProblem(
            block_shapes=[1],
            logdet_terms=[LogDetTerm(base=np.eye(1), factors={0: np.eye(1)})],
            linear={0: -100.0 * np.eye(1)},
            trace_budget=1.0,
        )
        value, blocks, _ = solve_logdet_max(prob, tol=1e-12)
        assert blocks[0].real.item() == pytest.approx(0.0, abs=1e-8)

    def test_monotone_trace(self):
        rng = np.random.default_rng(2)
        h = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        prob = LogDetProblem(
            block_shapes=[3],
            logdet_terms=[LogDetTerm(base=np.eye(3), factors={0: h})],
            trace_budget=5.0,
        )
        _, _, meta = solve_logdet_max(prob, tol=1e-9)
        assert np.all(np.diff(meta["trace"]) >= -1e-12)

    def test_respects_constraints(self):
        rng = np.random.default_rng(3)
        h = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        prob = LogDetProblem(
            block_shapes=[2],
            logdet_terms=[LogDetTerm(base=np.eye(2), factors={0: h})],
            trace_budget=2.0,
        )
        _, blocks, _ = solve_logdet_max(prob)
        assert np.real(np.trace(blocks[0])) <= 2.0 + 1e-9
        assert np.linalg.eigvalsh(blocks[0])[0] >= -1e-12

    def test_init_projected_into_feasible_set(self):
        prob = LogDetProblem(
            block_shapes=[1],
            logdet_terms=[LogDetTerm(base=np.eye(1), factors={0: np.eye(1)})],
            trace_budget=1.0,
        )
        _, blocks, _ = solve_logdet_max(prob, init=[np.array([[5.0]])])
        assert np.real(np.trace(blocks[0])) <= 1.0 + 1e-9
