import math

import numpy as np
import pytest

from secrecy_opt.channel import (
    AntennaConfig,
    CovariancePair,
    WiretapChannel,
    make_secrecy_result,
    sample_channel,
)
from secrecy_opt.mimome import (
    VariationalState,
    default_initialization,
    gauss_seidel_solve,
    q_update,
    s_update,
    theta_objective,
)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_psd(rng, n, jitter=1e-3):
    m = crandn(rng, n, n)
    return m @ m.conj().T + jitter * np.eye(n)


class TestTheta:
    def test_zero_point(self):
        ch = sample_channel(AntennaConfig(2, 2, 2, 2), 0)
        cov = CovariancePair(qa=np.zeros((2, 2)), qj=np.zeros((2, 2)))
        state = VariationalState(s0=np.eye(2), s1=np.eye(2))
        assert theta_objective(ch, state, cov) == pytest.approx(0.0, abs=1e-12)

    def test_singular_state_sentinel(self):
        ch = sample_channel(AntennaConfig(2, 2, 2, 2), 0)
        cov = CovariancePair(qa=np.eye(2), qj=np.eye(2))
        state = VariationalState(s0=np.zeros((2, 2)), s1=np.eye(2))
        assert theta_objective(ch, state, cov) == -math.inf

    def test_bridge_identity(self):
        rng = np.random.default_rng(1)
        ch = sample_channel(AntennaConfig(3, 2, 3, 2), 1)
        cov = CovariancePair(qa=random_psd(rng, 3), qj=random_psd(rng, 2))
        state = s_update(ch, cov)
        theta = theta_objective(ch, state, cov)
        res = make_secrecy_result(ch, cov)
        assert theta == pytest.approx(math.log(2) * (res.rd - res.re),
                                      abs=1e-8)

    def test_scalar_balanced(self):
        ch = WiretapChannel(h1=[[1.0]], g1=[[1.0]], g2=[[1.0]], h2=[[1.0]],
                            config=AntennaConfig(1, 1, 1, 1))
        cov = CovariancePair(qa=[[1.0]], qj=[[1.0]])
        theta = theta_objective(ch, s_update(ch, cov), cov)
        assert theta == pytest.approx(0.0, abs=1e-12)


class TestSUpdate:
    def test_zero_cov(self):
        ch = sample_channel(AntennaConfig(2, 2, 2, 2), 2)
        cov = CovariancePair(qa=np.zeros((2, 2)), qj=np.zeros((2, 2)))
        state = s_update(ch, cov)
        assert np.allclose(state.s0, np.eye(2))
        assert np.allclose(state.s1, np.eye(2))

    def test_scalar_value(self):
        ch = WiretapChannel(h1=[[1.0]], g1=[[1.0]], g2=[[1.0]], h2=[[1.0]],
                            config=AntennaConfig(1, 1, 1, 1))
        cov = CovariancePair(qa=[[0.0]], qj=[[3.0]])
        assert s_update(ch, cov).s0[0, 0] == pytest.approx(0.25)

    def test_maximality(self):
        rng = np.random.default_rng(3)
        ch = sample_channel(AntennaConfig(2, 2, 2, 2), 3)
        cov = CovariancePair(qa=random_psd(rng, 2), qj=random_psd(rng, 2))
        best = theta_objective(ch, s_update(ch, cov), cov)
        for _ in range(100):
            state = VariationalState(s0=random_psd(rng, 2),
                                     s1=random_psd(rng, 2))
            assert theta_objective(ch, state, cov) <= best + 1e-10


class TestQUpdate:
    def test_scalar_matches_grid(self):
        ch = WiretapChannel(h1=[[1.0]], g1=[[1.0]], g2=[[1.0]], h2=[[1.0]],
                            config=AntennaConfig(1, 1, 1, 1))
        state = VariationalState(s0=np.eye(1), s1=np.eye(1))
        cov, _ = q_update(ch, state, 1.0, tol=1e-12)
        qa = np.linspace(0, 1, 1000)[:, None]
        qj = np.linspace(0, 1, 1000)[None, :]
        val = -2 * qj - qa + np.log(1 + qa + qj) + np.log(1 + qj)
        val = np.where(qa + qj <= 1, val, -np.inf)
        i, j = np.unravel_index(np.argmax(val), val.shape)
        assert cov.qa.real.item() == pytest.approx(qa[i, 0], abs=1e-3)
        assert cov.qj.real.item() == pytest.approx(qj[0, j], abs=1e-3)

    def test_penalty_forces_zero_source(self):
        ch = sample_channel(AntennaConfig(2, 2, 2, 2), 4)
        p = 10.0
        state = VariationalState(s0=np.eye(2), s1=1e4 * np.eye(2))
        cov, _ = q_update(ch, state, p)
        assert np.real(np.trace(cov.qa)) < 0.01 * p

    def test_decoupled_waterfilling(self):
        # no cross links: Qa water-fills on h1, Qj on h2 independently
        rng = np.random.default_rng(5)
        h1, h2 = crandn(rng, 2, 2), crandn(rng, 2, 2)
        ch = WiretapChannel(h1=h1, g1=np.zeros((2, 2)),
                            g2=np.zeros((2, 2)), h2=h2,
                            config=AntennaConfig(2, 2, 2, 2))
        state = VariationalState(s0=np.eye(2), s1=np.eye(2))
        p = 4.0
        cov, _ = q_update(ch, state, p, tol=1e-12)

        def waterfill(h, budget):
            g = np.linalg.eigvalsh(h.conj().T @ h)[::-1]
            for active in range(g.size, 0, -1):
                mu = (budget + np.sum(1.0 / g[:active])) / active
                lam = mu - 1.0 / g[:active]
                if lam[-1] >= 0:
                    return float(np.sum(np.log(1 + g[:active] * lam)))
            return 0.0

        # with s1 = I the jammer's eavesdropper log-det is traded against
        # -tr(Qj h2^H h2); the source term is pure water-filling on h1
        got_a = math.fsum(np.log(np.linalg.eigvalsh(
            np.eye(2) + h1 @ cov.qa @ h1.conj().T)))
        budget_a = float(np.real(np.trace(cov.qa)))
        assert got_a == pytest.approx(waterfill(h1, budget_a), abs=1e-5)

    def test_monotone_from_init(self):
        rng = np.random.default_rng(6)
        ch = sample_channel(AntennaConfig(3, 3, 3, 4), 6)
        init = CovariancePair(qa=random_psd(rng, 3), qj=random_psd(rng, 4))
        scale = 5.0 / init.total_power()
        init = CovariancePair(qa=init.qa * scale, qj=init.qj * scale)
        state = s_update(ch, init)
        before = theta_objective(ch, state, init)
        cov, _ = q_update(ch, state, 5.0, init=init)
        after = theta_objective(ch, state, cov)
        assert after >= before - 1e-9


class TestGaussSeidel:
    def test_monotone_and_bridge(self):
        ch = sample_channel(AntennaConfig(3, 3, 3, 4), 7)
        rep = gauss_seidel_solve(ch, 10.0)
        trace = np.asarray(rep.objective_trace)
        assert np.all(np.diff(trace) >= -1e-9)
        assert max(rep.diagnostics["bridge_residuals"]) < 1e-8
        assert rep.converged

    def test_final_beats_initialization(self):
        ch = sample_channel(AntennaConfig(3, 3, 3, 4), 8)
        p = 100.0
        init = default_initialization(ch, p)
        init_cs = make_secrecy_result(ch, init).cs
        rep = gauss_seidel_solve(ch, p, init=init)
        assert rep.final.cs >= init_cs - 1e-6

    def test_zero_iterations_budget(self):
        ch = sample_channel(AntennaConfig(2, 2, 2, 2), 9)
        init = default_initialization(ch, 5.0)
        rep = gauss_seidel_solve(ch, 5.0, init=init, max_iters=0)
        assert rep.iterations == 0
        assert rep.final.cs == pytest.approx(
            make_secrecy_result(ch, init).cs, abs=1e-9)

    def test_unitary_invariance(self):
        # rotating the source antennas must not change the achieved rate
        ch = sample_channel(AntennaConfig(3, 3, 3, 4), 10)
        rng = np.random.default_rng(0)
        q, _ = np.linalg.qr(crandn(rng, 3, 3))
        rotated = WiretapChannel(h1=ch.h1 @ q, g1=ch.g1 @ q,
                                 g2=ch.g2, h2=ch.h2, config=ch.config)
        a = gauss_seidel_solve(ch, 10.0, tol=1e-6).final.cs
        b = gauss_seidel_solve(rotated, 10.0, tol=1e-6).final.cs
        assert a == pytest.approx(b, abs=1e-4)

    def test_isotropic_fallback_init(self):
        # zero secure degrees of freedom still yields a valid solve
        ch = sample_channel(AntennaConfig(1, 1, 2, 1), 11)
        init = default_initialization(ch, 4.0)
        assert init.total_power() == pytest.approx(4.0)
        rep = gauss_seidel_solve(ch, 4.0)
        assert rep.final.cs >= 0.0
