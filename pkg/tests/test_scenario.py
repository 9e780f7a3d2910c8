import numpy as np
import pytest

from statepool.errors import DimensionMismatchError
from statepool.linalg import max_norm, partial_trace, tensor
from statepool.scenario import (
    AgentPipeline,
    KrausChannel,
    ScenarioConfig,
    UnitaryDynamics,
    adversarial_instance,
    apply_channel,
    batch_report,
    dephasing_channel,
    depolarizing_channel,
    evolve,
    haar_unitary,
    random_density,
    random_instance,
    replacement_channel,
    run_pipeline,
    run_scenario,
)

from oracles import rand_density, rand_unitary

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)


def proj(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj()) / np.vdot(v, v)


class TestChannels:
    def test_identity_channel(self):
        rng = np.random.default_rng(0)
        rho = rand_density(rng, 3)
        ch = KrausChannel((np.eye(3),))
        assert max_norm(apply_channel(ch, rho) - rho) < 1e-12

    def test_full_dephasing_kills_coherences(self):
        ch = KrausChannel((np.diag([1.0, 0.0]), np.diag([0.0, 1.0])))
        assert max_norm(apply_channel(ch, proj([1, 1])) - np.eye(2) / 2) < 1e-12

    def test_partial_trace_as_channel(self):
        # Kraus ops <i| (x) I implement Tr_A
        rng = np.random.default_rng(1)
        ra, rb = rand_density(rng, 2), rand_density(rng, 3)
        ops = tuple(np.kron(np.eye(2)[i, :].reshape(1, 2), np.eye(3)) for i in range(2))
        ch = KrausChannel(ops)
        got = apply_channel(ch, tensor(ra, rb))
        assert max_norm(got - partial_trace(tensor(ra, rb), [2, 3], [1])) < 1e-12

    def test_trace_preservation_enforced(self):
        with pytest.raises(ValueError, match="trace preservation"):
            KrausChannel((np.eye(2) * 0.5,))

    def test_channel_preserves_state_validity(self):
        rng = np.random.default_rng(2)
        for dim in (2, 4, 8):
            ch = depolarizing_channel(dim, 0.7)
            for _ in range(10):
                out = apply_channel(ch, rand_density(rng, dim))
                assert np.trace(out).real == pytest.approx(1.0, abs=1e-10)
                assert np.linalg.eigvalsh(out).min() >= -1e-10


class TestEvolve:
    def test_identity(self):
        rng = np.random.default_rng(3)
        rho = rand_density(rng, 2)
        assert max_norm(evolve(UnitaryDynamics(np.eye(2)), rho) - rho) == 0

    def test_hadamard_on_ket0(self):
        got = evolve(UnitaryDynamics(HADAMARD), proj([1, 0]))
        assert max_norm(got - proj([1, 1])) < 1e-12

    def test_maximally_mixed_invariant(self):
        rng = np.random.default_rng(4)
        u = UnitaryDynamics(rand_unitary(rng, 4))
        assert max_norm(evolve(u, np.eye(4) / 4) - np.eye(4) / 4) < 1e-12

    def test_spectrum_preserved(self):
        rng = np.random.default_rng(5)
        rho = rand_density(rng, 5)
        u = UnitaryDynamics(rand_unitary(rng, 5))
        assert np.allclose(np.linalg.eigvalsh(evolve(u, rho)),
                           np.linalg.eigvalsh(rho), atol=1e-10)

    def test_non_unitary_rejected(self):
        with pytest.raises(ValueError, match="unitary"):
            UnitaryDynamics(np.diag([1.0, 0.5]))


class TestPipelines:
    def test_empty_pipeline(self):
        rng = np.random.default_rng(6)
        rho = rand_density(rng, 2)
        assert max_norm(run_pipeline(AgentPipeline("idle"), rho) - rho) == 0

    def test_composition_order(self):
        rng = np.random.default_rng(7)
        rho = rand_density(rng, 2)
        u = UnitaryDynamics(rand_unitary(rng, 2))
        ch = dephasing_channel(2, 0.3)
        p = AgentPipeline("W", (u, ch))
        assert max_norm(run_pipeline(p, rho) - apply_channel(ch, evolve(u, rho))) < 1e-12

    def test_fixed_instance_regression(self):
        # frozen posteriors for a fixed qubit instance, computed once
        rho = np.diag([0.6, 0.4])
        wanda = AgentPipeline("Wanda", (dephasing_channel(2, 0.5),))
        theo = AgentPipeline("Theo", (UnitaryDynamics(HADAMARD), depolarizing_channel(2, 0.5)))
        s1 = run_pipeline(wanda, rho)
        s2 = run_pipeline(theo, rho)
        assert max_norm(s1 - np.diag([0.6, 0.4])) < 1e-12
        want2 = np.array([[0.5, 0.05], [0.05, 0.5]])
        assert max_norm(s2 - want2) < 1e-12

    def test_dim_chain_validated(self):
        with pytest.raises(DimensionMismatchError):
            AgentPipeline("bad", (UnitaryDynamics(np.eye(2)), UnitaryDynamics(np.eye(3))))


class TestRunScenario:
    def test_empty_pipelines_pool_to_prior(self):
        rng = np.random.default_rng(8)
        rho = rand_density(rng, 2)
        cfg = ScenarioConfig(prior=rho, pipelines=(AgentPipeline("W"), AgentPipeline("T")))
        res = run_scenario(cfg)
        assert res.verdict.compatible
        assert max_norm(res.pooling.pooled - rho) < 1e-10

    def test_orthogonal_projections_incompatible_not_thrown(self):
        rng = np.random.default_rng(9)
        cfg = ScenarioConfig(
            prior=rand_density(rng, 2),
            pipelines=(AgentPipeline("W", (replacement_channel(2, 0),)),
                       AgentPipeline("T", (replacement_channel(2, 1),))),
        )
        res = run_scenario(cfg)
        assert not res.verdict.compatible
        assert res.pooling is None
        assert res.pooling_error["error"] == "IncompatibleAssignmentsError"

    def test_commuting_diagonal_scenario_matches_classical(self):
        from statepool.compatibility import ProbabilityDistribution
        from statepool.pooling import classical_pool

        prior = np.diag([0.5, 0.3, 0.2])
        cfg = ScenarioConfig(
            prior=prior,
            pipelines=(AgentPipeline("W", (dephasing_channel(3, 1.0),)),
                       AgentPipeline("T", (dephasing_channel(3, 0.4),))),
        )
        res = run_scenario(cfg)
        q = lambda m: ProbabilityDistribution((0, 1, 2), np.diagonal(m).real)
        want = classical_pool(q(prior), q(res.sigma1), q(res.sigma2))
        assert max_norm(np.diagonal(res.pooling.pooled).real - want.pooled.probs) < 1e-10

    def test_identical_pipelines_always_compatible(self):
        for seed in range(20):
            cfg = random_instance(3, seed, 0.5)
            same = ScenarioConfig(prior=cfg.prior,
                                  pipelines=(cfg.pipelines[0], cfg.pipelines[0]))
            res = run_scenario(same)
            assert res.verdict.compatible

    def test_pool_against_evolved_switch(self):
        rng = np.random.default_rng(10)
        rho = rand_density(rng, 2)
        u = UnitaryDynamics(rand_unitary(rng, 2))
        cfg = ScenarioConfig(
            prior=rho,
            pipelines=(AgentPipeline("W", (u,)), AgentPipeline("T", (u,))),
            pool_against_evolved=True,
            evolved_by=u,
        )
        res = run_scenario(cfg)
        # both posteriors equal the evolved prior, so pooling against it is exact
        assert res.pooling is not None
        assert max_norm(res.pooling.pooled - evolve(u, rho)) < 1e-10


class TestRandomInstance:
    def test_determinism(self):
        a = random_instance(3, 42, 0.3)
        b = random_instance(3, 42, 0.3)
        assert max_norm(a.prior - b.prior) == 0
        for pa, pb in zip(a.pipelines, b.pipelines):
            for sa, sb in zip(pa.steps, pb.steps):
                ma = sa.u if isinstance(sa, UnitaryDynamics) else sa.kraus_ops[0]
                mb = sb.u if isinstance(sb, UnitaryDynamics) else sb.kraus_ops[0]
                assert max_norm(ma - mb) == 0

    def test_noiseless_is_unitary_only(self):
        cfg = random_instance(2, 0, 0.0)
        for p in cfg.pipelines:
            assert all(isinstance(s, UnitaryDynamics) for s in p.steps)

    def test_batch_validity_of_priors(self):
        for seed in range(200):
            cfg = random_instance(2, seed, 0.5)
            assert np.trace(cfg.prior).real == pytest.approx(1.0, abs=1e-10)
            assert np.linalg.eigvalsh(cfg.prior).min() >= -1e-10

    def test_dim_below_two_rejected(self):
        with pytest.raises(ValueError):
            random_instance(1, 0)


class TestBatchReport:
    def test_noiseless_full_rank_all_compatible(self):
        rows = batch_report([2, 3], count=20, noise_grid=[0.0], seed=1)
        for row in rows:
            assert row["frac_compatible"] == 1.0

    def test_adversarial_all_incompatible(self):
        rows = batch_report([2], count=20, noise_grid=[0.0], seed=1,
                            generator="adversarial")
        assert rows[0]["frac_compatible"] == 0.0

    def test_deterministic(self):
        a = batch_report([2], count=10, noise_grid=[0.3, 0.7], seed=5)
        b = batch_report([2], count=10, noise_grid=[0.3, 0.7], seed=5)
        assert a == b

    def test_identical_pipelines_residuals(self):
        # identical diagonal pipelines: pooling product is Hermitian
        from statepool.scenario import run_scenario

        for seed in range(10):
            rng = np.random.default_rng(seed)
            prior = np.diag(rng.random(3) + 0.1)
            prior /= np.trace(prior).real
            ch = dephasing_channel(3, 0.6)
            cfg = ScenarioConfig(prior=prior,
                                 pipelines=(AgentPipeline("W", (ch,)),
                                            AgentPipeline("T", (ch,))))
            res = run_scenario(cfg)
            assert res.pooling is not None
            assert res.pooling.hermiticity_residual <= 1e-10


def test_haar_unitary_is_unitary():
    rng = np.random.default_rng(11)
    for dim in (2, 5, 8):
        u = haar_unitary(dim, rng)
        assert max_norm(u.conj().T @ u - np.eye(dim)) < 1e-10


def test_adversarial_instance_shape():
    cfg = adversarial_instance(4, 0)
    res = run_scenario(cfg)
    assert not res.verdict.compatible
