import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats

from errors import InvalidParameterError
from physics.geometry import admissible_mask
from sampling.mcmc import (
    ConditionalSlabSampler,
    McmcConfig,
    effective_sample_size,
    sample_conditional_slab,
    sample_microcanonical,
    sample_microcanonical_chain,
)
from sampling.state import state_violations


def _quick(**overrides) -> McmcConfig:
    values = dict(burn_in=2000, thinning=50, samples=40, seed=7)
    values.update(overrides)
    return McmcConfig(**values)


def test_config_defaults_and_validation():
    cfg = McmcConfig()
    assert cfg.thinning_for(30) == 300
    assert McmcConfig(thinning=5).thinning_for(30) == 5
    with pytest.raises(ValidationError):
        McmcConfig(target_acceptance=1.5)
    with pytest.raises(ValidationError):
        McmcConfig(steps=10)


def test_microcanonical_state_is_valid(floating_params):
    state = sample_microcanonical(floating_params, _quick())
    assert state_violations(state, floating_params, energy_rtol=1e-9) == []


def test_chain_produces_samples_and_diagnostics(floating_params):
    run = sample_microcanonical_chain(floating_params, _quick(), rng=np.random.default_rng(1))
    assert len(run) == 40
    assert np.all(run.ball_heights > floating_params.R)
    assert np.all(run.ball_heights < floating_params.ceiling)
    assert run.ball_horizontal.shape == (40, 1)
    diagnostics = run.diagnostics.to_dict()
    assert diagnostics["steps"] == 2000 + 40 * 50
    assert set(diagnostics["acceptance"]) == {"particle", "ball"}
    assert all(0.0 < rate < 1.0 for rate in diagnostics["acceptance"].values())
    for state in run.states():
        assert state_violations(state, floating_params, energy_rtol=1e-9) == []


def test_chain_is_reproducible(floating_params):
    first = sample_microcanonical_chain(floating_params, _quick(samples=5), rng=np.random.default_rng(2))
    second = sample_microcanonical_chain(floating_params, _quick(samples=5), rng=np.random.default_rng(2))
    np.testing.assert_array_equal(first.positions, second.positions)


def test_effective_sample_size():
    rng = np.random.default_rng(0)
    iid = rng.standard_normal(2000)
    assert 1000 < effective_sample_size(iid) < 4000
    walk = np.cumsum(rng.standard_normal(2000))
    assert effective_sample_size(walk) < 200
    assert effective_sample_size(np.ones(50)) == 50.0


def test_slab_chain_keeps_the_mean_height(floating_params):
    sampler = ConditionalSlabSampler(np.zeros(1), 0.8, 1.0, 30, floating_params, _quick(samples=20))
    run = sampler.run()
    assert run.ys.shape == (20, 30)
    np.testing.assert_allclose(run.ys.mean(axis=1), 1.0, rtol=1e-10)
    for xs, ys in zip(run.xs, run.ys):
        assert np.all(admissible_mask(xs, ys, np.zeros(1), 0.8, floating_params.with_particles(30)))
    assert sampler.lam > 0.0


def test_sample_conditional_slab_shapes(floating_params_3d):
    xs, ys = sample_conditional_slab(np.zeros(2), 1.0, 0.9, 12, floating_params_3d, _quick())
    assert xs.shape == (12, 2)
    assert ys.sum() == pytest.approx(12 * 0.9, rel=1e-10)


def test_slab_rejects_non_positive_mean(floating_params):
    with pytest.raises(InvalidParameterError):
        ConditionalSlabSampler(np.zeros(1), 0.8, 0.0, 10, floating_params, _quick())


def test_chain_without_ball_matches_the_exact_height_marginal(no_ball_params):
    # two particles in 2D: density ∝ E − PE, so one height has cdf 1 − (1 − y/Y)³ with Y = E/(m_p g)
    params = no_ball_params.with_particles(2)
    top = params.E / (params.particle_mass * params.g)
    run = sample_microcanonical_chain(
        params, _quick(burn_in=5000, thinning=100, samples=600), rng=np.random.default_rng(11)
    )
    heights = run.positions[:, 0, -1]
    height_ks = stats.kstest(heights, lambda y: 1.0 - (1.0 - np.clip(y / top, 0.0, 1.0)) ** 3).statistic
    assert height_ks < 0.1
    horizontal = run.positions[:, 0, 0]
    assert stats.kstest(horizontal, stats.uniform(-params.rho_b, 2.0 * params.rho_b).cdf).statistic < 0.1
    assert np.all(run.positions[:, -1] == run.positions[0, -1])


def test_slab_chain_is_uniform_on_the_simplex(no_ball_params):
    # three heights summing to 3u: marginal cdf 1 − (1 − y/3u)², pair correlation −1/2
    u = 1.0
    sampler = ConditionalSlabSampler(
        np.zeros(1), 0.0, u, 3, no_ball_params, _quick(burn_in=5000, thinning=100, samples=600),
        rng=np.random.default_rng(5),
    )
    run = sampler.run()
    pooled = run.ys.ravel()
    assert stats.kstest(pooled, lambda y: 1.0 - (1.0 - np.clip(y / (3.0 * u), 0.0, 1.0)) ** 2).statistic < 0.1
    correlation = np.corrcoef(run.ys[:, 0], run.ys[:, 1])[0, 1]
    assert correlation == pytest.approx(-0.5, abs=0.12)
