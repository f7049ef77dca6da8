import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional
import numpy as np
from scipy import stats
from core.errors import ConfigError
from core.likelihood import distance_matrix, log_likelihood_matrix, log_posterior
from core.schema import Hyperparams, VoteMatrix, MISSING
from core.state import ModelState, check_state, copy_state, initial_state
from utils.config import get_workers
from utils.logs import get_logger
from utils.rng import CounterStream
from .kernels import block_draws, gibbs_update_sigma_theta, impute_missing, mh_update_block, mh_update_scalar
from .schema import ChainDraws, SamplerConfig, TARGET_ACCEPTANCE

logger = get_logger(__name__)

class Tally:
    """Accepted / proposed counts per MH block."""

    def __init__(self):
        self.accepted: Dict[str, int] = {}
        self.proposed: Dict[str, int] = {}

    def add(self, block: str, accepted: int, proposed: int):
        self.accepted[block] = self.accepted.get(block, 0) + int(accepted)
        self.proposed[block] = self.proposed.get(block, 0) + int(proposed)

    def merge(self, other: "Tally"):
        for block in other.proposed:
            self.add(block, other.accepted.get(block, 0), other.proposed[block])

    def rates(self) -> Dict[str, float]:
        return {b: self.accepted[b] / self.proposed[b] for b in self.proposed if self.proposed[b]}

def _exact_block(current, block_key, step, rng, state, work, hyper):
    """Serial replay of a block with full log_posterior differences (reference path)."""
    eps, log_u = block_draws(rng, current.shape, step)
    proposal = current + eps
    values = current.copy()
    accept = np.zeros(current.shape[0], dtype=bool)
    before = copy_state(state)
    before[block_key] = values.copy()
    lp_before = log_posterior(before, work, hyper)
    for idx in range(current.shape[0]):
        after = copy_state(before)
        after[block_key][idx] = proposal[idx]
        lp_after = log_posterior(after, work, hyper)
        delta = lp_after - lp_before
        if np.isfinite(delta) and log_u[idx] < delta:
            before, lp_before = after, lp_after
            accept[idx] = True
    return before[block_key], accept

def gibbs_sweep(
    state: ModelState,
    data: VoteMatrix,
    hyper: Hyperparams,
    config: SamplerConfig,
    rng: CounterStream,
    iteration: int = 0,
    steps: Optional[Dict[str, float]] = None,
    tally: Optional[Tally] = None,
    exact: bool = False,
) -> ModelState:
    """One scan: impute -> theta -> beta -> log gamma -> Z -> W -> sigma_theta^2.

    Blocks are updated vectorized over their indices; theta_i and z_i only see
    row i, beta_j and w_j only column j, so this equals the serial scan. With
    exact=True every MH decision is replayed from full log_posterior differences.
    """
    check_state(state, data, hyper)
    steps = steps or config.steps()
    fixed = set(config.fixed_blocks)
    tally = tally if tally is not None else Tally()
    new = copy_state(state)

    y = data.cells
    dist = distance_matrix(new["z"], new["w"])
    base = new["theta"][:, None] + new["beta"][None, :]
    if (y == MISSING).any() and "impute" not in fixed:
        y = impute_missing(y, base - new["gamma"] * dist, rng.generator(iteration, "impute"))
    obs = y != MISSING
    work = data.with_cells(y) if exact else data

    def cell_ll(eta):
        return np.where(obs, log_likelihood_matrix(eta, y), 0.0)

    # theta_i: row i
    if "theta" not in fixed:
        g = rng.generator(iteration, "theta")
        s2 = new["sigma_theta_sq"]
        if exact:
            theta, acc = _exact_block(new["theta"], "theta", steps["theta"], g, new, work, hyper)
        else:
            rest = new["beta"][None, :] - new["gamma"] * dist

            def theta_target(t):
                return cell_ll(t[:, None] + rest).sum(axis=1) - t**2 / (2.0 * s2)

            theta, acc = mh_update_block(new["theta"], theta_target, steps["theta"], g)
        new["theta"] = theta
        tally.add("theta", acc.sum(), acc.size)

    # beta_j: column j
    if "beta" not in fixed:
        g = rng.generator(iteration, "beta")
        if exact:
            beta, acc = _exact_block(new["beta"], "beta", steps["beta"], g, new, work, hyper)
        else:
            rest = new["theta"][:, None] - new["gamma"] * dist

            def beta_target(b):
                return cell_ll(rest + b[None, :]).sum(axis=0) - b**2 / (2.0 * hyper.sigma_beta_sq)

            beta, acc = mh_update_block(new["beta"], beta_target, steps["beta"], g)
        new["beta"] = beta
        tally.add("beta", acc.sum(), acc.size)

    base = new["theta"][:, None] + new["beta"][None, :]

    # log gamma: proposal on the log scale keeps gamma > 0
    if "log_gamma" not in fixed:
        g = rng.generator(iteration, "log_gamma")
        sd_gamma = np.sqrt(hyper.sigma_gamma_sq)
        if exact:
            def phi_target(phi):
                trial = copy_state(new)
                trial["gamma"] = float(np.exp(phi))
                # density of log gamma = density of gamma times the Jacobian e^phi
                return log_posterior(trial, work, hyper) + phi
        else:
            def phi_target(phi):
                return cell_ll(base - np.exp(phi) * dist).sum() + stats.norm.logpdf(phi, hyper.mu_gamma, sd_gamma)

        phi, ok = mh_update_scalar(float(np.log(new["gamma"])), phi_target, steps["log_gamma"], g)
        new["gamma"] = float(np.exp(phi))
        tally.add("log_gamma", ok, 1)

    # z_i: row i
    if "z" not in fixed:
        g = rng.generator(iteration, "z")
        if exact:
            z, acc = _exact_block(new["z"], "z", steps["z"], g, new, work, hyper)
        else:
            w, gamma = new["w"], new["gamma"]

            def z_target(zz):
                return cell_ll(base - gamma * distance_matrix(zz, w)).sum(axis=1) - 0.5 * (zz**2).sum(axis=1)

            z, acc = mh_update_block(new["z"], z_target, steps["z"], g)
        new["z"] = z
        tally.add("z", acc.sum(), acc.size)

    # w_j: column j
    if "w" not in fixed:
        g = rng.generator(iteration, "w")
        if exact:
            w, acc = _exact_block(new["w"], "w", steps["w"], g, new, work, hyper)
        else:
            z, gamma = new["z"], new["gamma"]

            def w_target(ww):
                return cell_ll(base - gamma * distance_matrix(z, ww)).sum(axis=0) - 0.5 * (ww**2).sum(axis=1)

            w, acc = mh_update_block(new["w"], w_target, steps["w"], g)
        new["w"] = w
        tally.add("w", acc.sum(), acc.size)

    if "sigma_theta_sq" not in fixed:
        new["sigma_theta_sq"] = gibbs_update_sigma_theta(
            new["theta"], hyper.a_sigma, hyper.b_sigma, rng.generator(iteration, "sigma_theta_sq")
        )
    return new

def validate_run(data: VoteMatrix, hyper: Hyperparams, config: SamplerConfig):
    if config.n_draws() < 1:
        raise ConfigError(
            f"no draws would be stored: (n_iterations - burn_in) // thin = "
            f"({config.n_iterations} - {config.burn_in}) // {config.thin} = 0"
        )
    if not data.observed_mask().any():
        raise ConfigError("vote matrix has no observed cells")

def run_chain(data: VoteMatrix, hyper: Hyperparams, config: SamplerConfig, chain: int = 0) -> ChainDraws:
    """Run one chain; deterministic in (config.seed, chain)."""
    validate_run(data, hyper, config)
    stream = CounterStream(config.seed, chain)
    state = initial_state(
        data.n_legislators, data.n_bills, hyper, stream.generator(0, "init"), data=data, init=config.init
    )
    steps = config.steps()
    fixed = set(config.fixed_blocks)
    kept: List[ModelState] = []
    after_burnin = Tally()

    logger.info(
        "chain %d: %dx%d, K=%d, %d iterations (burn-in %d, thin %d), seed %d",
        chain, data.n_legislators, data.n_bills, hyper.k, config.n_iterations, config.burn_in, config.thin, config.seed,
    )
    started = time.perf_counter()
    for t in range(config.n_iterations):
        tally = Tally()
        state = gibbs_sweep(state, data, hyper, config, stream, iteration=t + 1, steps=steps, tally=tally)
        if t < config.burn_in:
            if config.adapt_during_burnin:
                rates = tally.rates()
                for block, target in TARGET_ACCEPTANCE.items():
                    if block in fixed or block not in rates or steps[block] <= 0:
                        continue
                    # Robbins-Monro on log step; frozen once burn-in ends
                    steps[block] *= float(np.exp((rates[block] - target) / (t + 1) ** 0.6))
            continue
        after_burnin.merge(tally)
        if (t - config.burn_in + 1) % config.thin == 0:
            kept.append(copy_state(state))
    elapsed = time.perf_counter() - started

    rates = {b: float(min(1.0, max(0.0, r))) for b, r in after_burnin.rates().items()}
    logger.info("chain %d finished in %.1fs; acceptance %s", chain, elapsed, {b: round(r, 3) for b, r in rates.items()})
    return ChainDraws.from_states(
        kept,
        acceptance_rates=rates,
        final_steps={b: float(s) for b, s in steps.items()},
        seed=config.seed,
        chain=chain,
        config_echo=config,
        elapsed_seconds=elapsed,
    )

def _chain_job(args) -> ChainDraws:
    data, hyper, config, chain = args
    return run_chain(data, hyper, config, chain=chain)

def run_chains(data: VoteMatrix, hyper: Hyperparams, config: SamplerConfig) -> List[ChainDraws]:
    """config.n_chains independent chains, in a process pool when LSIRM_WORKERS > 1."""
    validate_run(data, hyper, config)
    jobs = [(data, hyper, config, c) for c in range(config.n_chains)]
    workers = min(get_workers(), config.n_chains)
    if workers <= 1:
        return [_chain_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_chain_job, jobs))
