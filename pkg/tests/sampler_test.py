import math
import numpy as np
import pytest
from pydantic import ValidationError
from scipy.special import expit
import utils.config
from core.errors import ConfigError, ContractViolation
from core.likelihood import log_likelihood_matrix, probabilities
from core.schema import Hyperparams, MISSING, YEA
from core.state import make_state
from sampler.gibbs import Tally, gibbs_sweep, run_chain, run_chains
from sampler.kernels import (
    gibbs_update_sigma_theta,
    impute_missing,
    impute_missing_cell,
    mh_update_block,
    mh_update_scalar,
    mh_update_vector,
)
from sampler.schema import SamplerConfig
from utils.rng import CounterStream, generator_for
from helpers import random_state, random_votes, vote_matrix

FROZEN = ("impute", "beta", "log_gamma", "z", "w", "sigma_theta_sq")

# MH kernels
def test_constant_target_always_accepts():
    rng = generator_for(1, "kernel")
    x = 0.0
    for _ in range(1000):
        x, ok = mh_update_scalar(x, lambda v: 0.0, 1.0, rng)
        assert ok

def test_half_density_proposal_accepted_half_the_time():
    rng = generator_for(2, "kernel")
    target = lambda v: 0.0 if v == 0.0 else -math.log(2.0)
    accepted = sum(mh_update_scalar(0.0, target, 1.0, rng)[1] for _ in range(20000))
    assert accepted / 20000 == pytest.approx(0.5, abs=0.02)

def test_zero_density_proposal_rejected():
    rng = generator_for(3, "kernel")
    target = lambda v: 0.0 if v == 0.0 else -np.inf
    for _ in range(200):
        value, ok = mh_update_scalar(0.0, target, 1.0, rng)
        assert value == 0.0 and not ok

def test_nonfinite_current_is_a_contract_violation():
    with pytest.raises(ContractViolation):
        mh_update_scalar(0.0, lambda v: -np.inf, 1.0, generator_for(4, "kernel"))
    with pytest.raises(ContractViolation):
        mh_update_vector(np.zeros(2), lambda v: np.nan, 1.0, generator_for(4, "kernel"))

def test_vector_update_in_one_dimension_matches_scalar():
    target = lambda v: -0.5 * float(np.sum(np.square(v)))
    a, b = generator_for(5, "kernel"), generator_for(5, "kernel")
    x, y = 0.3, np.array([0.3])
    for _ in range(500):
        x, ok_x = mh_update_scalar(x, target, 1.3, a)
        y, ok_y = mh_update_vector(y, target, 1.3, b)
        assert ok_x == ok_y
        assert x == y[0]

def test_vector_constant_target_acceptance():
    rng = generator_for(6, "kernel")
    y = np.zeros(3)
    accepted = 0
    for _ in range(10000):
        y, ok = mh_update_vector(y, lambda v: 1.0, 0.5, rng)
        accepted += ok
    assert accepted == 10000

def test_vector_standard_normal_acceptance_band():
    rng = generator_for(7, "kernel")
    target = lambda v: -0.5 * float(v @ v)
    y = np.zeros(2)
    accepted = 0
    n = 30000
    for _ in range(n):
        y, ok = mh_update_vector(y, target, 2.4, rng)
        accepted += ok
    assert 0.30 <= accepted / n <= 0.45

class ReplayedDraws:
    """Hands mh_update_vector one row of pre-drawn normals and its uniform."""
    def __init__(self, normal, uniform):
        self.normal, self.uniform = normal, uniform

    def standard_normal(self, shape=None):
        return self.normal

    def random(self):
        return self.uniform

def test_block_update_matches_rowwise_vector_update(rng):
    n, k = 50, 2
    current = rng.normal(size=(n, k))
    rows = lambda m: -0.5 * np.sum(np.square(m), axis=1)
    target = lambda v: -0.5 * float(np.sum(np.square(v)))
    new, accepted = mh_update_block(current, rows, 1.0, generator_for(7, "kernel"))
    replay = generator_for(7, "kernel")
    normals, uniforms = replay.standard_normal((n, k)), replay.random(n)
    assert 0 < accepted.sum() < n
    for i in range(n):
        row, ok = mh_update_vector(current[i], target, 1.0, ReplayedDraws(normals[i], uniforms[i]))
        assert ok == accepted[i]
        assert np.array_equal(row, new[i])

# conjugate and imputation draws
def test_sigma_theta_mean_two():
    draws = gibbs_update_sigma_theta([1.0, -1.0], 1.0, 1.0, generator_for(8, "sigma"), size=1_000_000)
    assert draws.mean() == pytest.approx(2.0, rel=0.01)

def test_sigma_theta_mean_third():
    draws = gibbs_update_sigma_theta([0.0, 0.0], 3.0, 1.0, generator_for(9, "sigma"), size=200_000)
    assert draws.mean() == pytest.approx(1.0 / 3.0, rel=0.01)
    assert np.all(draws > 0)

def test_sigma_theta_rejects_nonpositive_constants():
    with pytest.raises(ContractViolation):
        gibbs_update_sigma_theta([0.0], 0.0, 1.0, generator_for(0, "sigma"))

def test_imputation_at_zero_predictor():
    cells = np.full((1, 100_000), MISSING, dtype=np.int8)
    filled = impute_missing(cells, np.zeros(cells.shape), generator_for(10, "impute"))
    assert (filled == YEA).mean() == pytest.approx(0.5, abs=0.005)

def test_imputation_saturates():
    cells = np.full((1, 100_000), MISSING, dtype=np.int8)
    filled = impute_missing(cells, np.full(cells.shape, 20.0), generator_for(11, "impute"))
    assert (filled == YEA).mean() > 0.9999

def test_single_cell_imputation_frequency():
    state = make_state([0.5], [0.3], 1.0, [[0.0]], [[1.0]], 1.0)
    rng = generator_for(12, "impute")
    draws = [impute_missing_cell(state, 0, 0, rng) for _ in range(20000)]
    assert np.mean(np.array(draws) == YEA) == pytest.approx(expit(-0.2), abs=0.012)

def test_imputation_keeps_observed_cells(rng):
    cells = np.array([[1, 0, -1], [-1, 1, 0]], dtype=np.int8)
    filled = impute_missing(cells, rng.normal(size=cells.shape) * 10, generator_for(13, "impute"))
    observed = cells != MISSING
    assert np.array_equal(filled[observed], cells[observed])
    assert set(np.unique(filled)) <= {0, 1}

# sweeps
def test_zero_steps_leave_state_unchanged_except_variance(rng):
    hyper = Hyperparams(k=2)
    data = random_votes(rng, 3, 4, missing=0.0)
    state = random_state(rng, 3, 4)
    config = SamplerConfig(step_theta=0, step_beta=0, step_loggamma=0, step_z=0, step_w=0)
    new = gibbs_sweep(state, data, hyper, config, CounterStream(1), iteration=1)
    for key in ("theta", "beta", "z", "w"):
        assert np.array_equal(new[key], state[key])
    assert new["gamma"] == state["gamma"]
    assert new["sigma_theta_sq"] != state["sigma_theta_sq"]
    assert new["sigma_theta_sq"] > 0

def test_conditional_and_full_posterior_decisions_agree(rng):
    hyper = Hyperparams(k=2)
    data = vote_matrix([[1, -1], [0, 1]])
    config = SamplerConfig(step_theta=0.8, step_beta=0.8, step_loggamma=0.4, step_z=0.6, step_w=0.6)
    stream = CounterStream(21)
    fast = exact = random_state(rng, 2, 2)
    for it in range(1, 30):
        fast = gibbs_sweep(fast, data, hyper, config, stream, iteration=it)
        exact = gibbs_sweep(exact, data, hyper, config, stream, iteration=it, exact=True)
        for key in ("theta", "beta", "z", "w"):
            np.testing.assert_allclose(fast[key], exact[key], rtol=0, atol=1e-9)
        assert fast["gamma"] == pytest.approx(exact["gamma"], abs=1e-9)

def test_acceptance_bookkeeping(rng):
    hyper = Hyperparams(k=2)
    data = random_votes(rng, 5, 6)
    state = random_state(rng, 5, 6)
    tally = Tally()
    stream = CounterStream(3)
    for it in range(1, 20):
        state = gibbs_sweep(state, data, hyper, SamplerConfig(), stream, iteration=it, tally=tally)
    for block, proposed in tally.proposed.items():
        assert 0 <= tally.accepted[block] <= proposed
    assert tally.proposed["theta"] == 19 * 5
    assert tally.proposed["log_gamma"] == 19

def test_sweep_checks_dimensions(rng):
    with pytest.raises(ContractViolation):
        gibbs_sweep(random_state(rng, 2, 2), random_votes(rng, 3, 2), Hyperparams(k=2), SamplerConfig(), CounterStream(0))

# chains
def small_config(**kw):
    base = dict(n_iterations=5, burn_in=0, thin=1, seed=99)
    base.update(kw)
    return SamplerConfig(**base)

def test_stored_draw_count(rng):
    chain = run_chain(random_votes(rng, 4, 5), Hyperparams(k=2), small_config())
    assert len(chain) == 5
    assert chain.z.shape == (5, 4, 2)
    assert chain.seed == 99
    assert all(0.0 <= r <= 1.0 for r in chain.acceptance_rates.values())

def test_thinning_arithmetic(rng):
    chain = run_chain(random_votes(rng, 4, 5), Hyperparams(k=1), small_config(n_iterations=23, burn_in=3, thin=4))
    assert len(chain) == (23 - 3) // 4

def test_chain_is_deterministic(rng):
    data, hyper = random_votes(rng, 4, 5), Hyperparams(k=2)
    a = run_chain(data, hyper, small_config(n_iterations=30, burn_in=10))
    b = run_chain(data, hyper, small_config(n_iterations=30, burn_in=10))
    for key in ("theta", "beta", "gamma", "z", "w", "sigma_theta_sq"):
        assert np.array_equal(getattr(a, key), getattr(b, key))
    c = run_chain(data, hyper, small_config(n_iterations=30, burn_in=10, seed=100))
    assert not np.array_equal(a.z, c.z)

def test_chains_do_not_depend_on_worker_count(rng, monkeypatch):
    data, hyper = random_votes(rng, 4, 5), Hyperparams(k=2)
    config = small_config(n_iterations=12, burn_in=4, n_chains=3)
    monkeypatch.setattr(utils.config, "GLOBAL_WORKERS", 1)
    serial = run_chains(data, hyper, config)
    monkeypatch.setattr(utils.config, "GLOBAL_WORKERS", 3)
    parallel = run_chains(data, hyper, config)
    assert [c.chain for c in parallel] == [0, 1, 2]
    for a, b in zip(serial, parallel):
        assert np.array_equal(a.z, b.z) and np.array_equal(a.gamma, b.gamma)
    assert not np.array_equal(serial[0].z, serial[1].z)

def test_pca_initialization_runs(rng):
    chain = run_chain(random_votes(rng, 6, 8), Hyperparams(k=2), small_config(init="pca"))
    assert np.all(np.isfinite(chain.z))

def test_invalid_configs():
    with pytest.raises(ValidationError):
        SamplerConfig(n_iterations=10, burn_in=10)
    with pytest.raises(ValidationError):
        SamplerConfig(thin=0)
    with pytest.raises(ValidationError):
        SamplerConfig(step_z=-1.0)
    with pytest.raises(ConfigError):
        run_chain(vote_matrix([[1, 0]]), Hyperparams(k=1), small_config(n_iterations=5, burn_in=2, thin=10))
    with pytest.raises(ConfigError):
        run_chain(vote_matrix([[-1, -1]]), Hyperparams(k=1), small_config())

def test_yea_pairs_sit_closer_than_nay_pairs():
    hyper = Hyperparams(k=2, mu_gamma=math.log(3.0), sigma_gamma_sq=0.01)
    yea, nay = [], []
    for seed in range(10):
        gen = np.random.default_rng(seed)
        truth = random_state(gen, 15, 15, gamma=3.0)
        data = vote_matrix((gen.random((15, 15)) < probabilities(truth)).astype(np.int8))
        chain = run_chain(data, hyper, small_config(n_iterations=1500, burn_in=500, thin=5, seed=seed))
        dist = np.linalg.norm(chain.z[:, :, None, :] - chain.w[:, None, :, :], axis=-1).mean(axis=0)
        yea.append(dist[data.cells == YEA].mean())
        nay.append(dist[data.cells != YEA].mean())
    assert np.mean(yea) < np.mean(nay)

def theta_conditional_tv(n_iterations: int, bin_width: float) -> float:
    """Histogram of theta_1 with every other block frozen vs its grid-normalized conditional."""
    data = vote_matrix([[1, 0, 1], [0, 1, 1], [1, 1, 0]])
    hyper = Hyperparams(k=1)
    state = make_state([0.2, -0.3, 0.1], [0.4, -0.2, 0.0], 1.5, [[0.5], [-0.5], [0.0]], [[0.3], [-0.4], [1.0]], 1.0)
    config = SamplerConfig(
        n_iterations=n_iterations, burn_in=100, thin=1, step_theta=2.0,
        adapt_during_burnin=False, fixed_blocks=FROZEN, seed=5,
    )
    stream = CounterStream(config.seed)
    draws = np.empty(n_iterations - config.burn_in)
    for t in range(n_iterations):
        state = gibbs_sweep(state, data, hyper, config, stream, iteration=t + 1)
        if t >= config.burn_in:
            draws[t - config.burn_in] = state["theta"][0]

    grid = np.linspace(-10, 10, 2001)
    rest = state["beta"][None, :] - state["gamma"] * np.abs(state["z"][0, 0] - state["w"][:, 0])[None, :]
    y = np.broadcast_to(data.cells[0], (grid.size, 3))
    log_dens = log_likelihood_matrix(grid[:, None] + rest, y).sum(axis=1) - grid**2 / 2.0
    dens = np.exp(log_dens - log_dens.max())
    edges = np.arange(-10, 10 + bin_width, bin_width)
    expected = np.array([dens[(grid >= lo) & (grid < hi)].sum() for lo, hi in zip(edges[:-1], edges[1:])])
    expected /= expected.sum()
    observed, _ = np.histogram(draws, bins=edges)
    observed = observed / observed.sum()
    return 0.5 * float(np.abs(observed - expected).sum())

def test_restricted_model_matches_grid_density():
    assert theta_conditional_tv(200_100, bin_width=0.5) < 0.02
