"""Two-dimensional Bayesian IRT comparator: P(y_ij = 1) = Phi(beta_j' x_i - alpha_j)
with Normal(0, prior_sd^2) priors on every parameter, fitted by random-walk
MH within Gibbs on the same counter-based streams as the latent space sampler."""
import math
import time
from typing import Any, Dict, Optional, TypedDict
import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import stats
from scipy.special import log_ndtr, ndtr
from core.errors import ContractViolation
from core.schema import VoteMatrix, MISSING, YEA
from identify.align import Positions, center, principal_axes_rotate, procrustes_transform
from sampler.gibbs import Tally, validate_run
from sampler.kernels import mh_update_block
from sampler.schema import SamplerConfig
from utils.logs import get_logger
from utils.rng import CounterStream

logger = get_logger(__name__)

BIRT_TARGETS = {"x": 0.234, "discrimination": 0.234, "difficulty": 0.44}

class BirtState(TypedDict):
    x: np.ndarray               # (N, D) ideal points
    discrimination: np.ndarray  # (P, D)
    difficulty: np.ndarray      # (P,)

def birt_linear_predictor(state: BirtState) -> np.ndarray:
    return state["x"] @ state["discrimination"].T - state["difficulty"][None, :]

def birt_probabilities(state: BirtState) -> np.ndarray:
    return ndtr(birt_linear_predictor(state))

def _check(state: BirtState, data: VoteMatrix):
    x, disc, diff = state["x"], state["discrimination"], state["difficulty"]
    if x.shape[0] != data.n_legislators or disc.shape[0] != data.n_bills or diff.shape[0] != data.n_bills:
        raise ContractViolation(
            f"BIRT state ({x.shape[0]}x{disc.shape[0]}) does not match data {data.cells.shape}"
        )
    if x.shape[1] != disc.shape[1]:
        raise ContractViolation("ideal points and discriminations differ in dimension")
    if not all(np.isfinite(a).all() for a in (x, disc, diff)):
        raise ContractViolation("BIRT state has non-finite entries")

def _cell_ll(eta: np.ndarray, cells: np.ndarray) -> np.ndarray:
    """Probit log-mass per cell, 0 for Missing."""
    sign = np.where(cells == YEA, 1.0, -1.0)
    return np.where(cells == MISSING, 0.0, log_ndtr(sign * eta))

def birt_log_posterior(state: BirtState, data: VoteMatrix, prior_sd: float = 1.0) -> float:
    if not prior_sd > 0:
        raise ContractViolation("prior_sd must be positive")
    _check(state, data)
    ll = _cell_ll(birt_linear_predictor(state), data.cells)
    prior = sum(
        float(stats.norm.logpdf(a, 0.0, prior_sd).sum())
        for a in (state["x"], state["discrimination"], state["difficulty"])
    )
    return math.fsum(ll.ravel().tolist()) + prior

class BirtFit(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    x: np.ndarray               # (D, N, dims) raw draws
    discrimination: np.ndarray  # (D, P, dims)
    difficulty: np.ndarray      # (D, P)
    aligned_x: np.ndarray
    aligned_discrimination: np.ndarray
    aligned_difficulty: np.ndarray
    mean_state: Dict[str, Any]  # BirtState of aligned means
    acceptance_rates: Dict[str, float] = Field(default_factory=dict)
    seed: int = 0
    chain: int = 0
    config_echo: SamplerConfig = Field(default_factory=SamplerConfig)
    elapsed_seconds: float = 0.0

    def __len__(self) -> int:
        return int(self.difficulty.shape[0])

    def draw(self, d: int) -> BirtState:
        return BirtState(x=self.x[d].copy(), discrimination=self.discrimination[d].copy(), difficulty=self.difficulty[d].copy())

def align_birt_draws(x: np.ndarray, disc: np.ndarray, diff: np.ndarray, reference_index: int = -1):
    """Center / principal-axes / reflect the reference ideal-point cloud, Procrustes-align
    every draw to it, and carry the map over to (discrimination, difficulty) so that
    every linear predictor is unchanged."""
    n_draws, _, dims = x.shape
    ref_idx = reference_index % n_draws
    empty = np.zeros((0, dims))
    reference = principal_axes_rotate(center(Positions(x[ref_idx], empty))).z
    ax, ad, aa = np.empty_like(x), np.empty_like(disc), np.empty_like(diff)
    for d in range(n_draws):
        q, mx, my = procrustes_transform(x[d], reference)
        ax[d] = (x[d] - mx) @ q + my
        ad[d] = disc[d] @ q
        aa[d] = diff[d] + ad[d] @ my - disc[d] @ mx
    return ax, ad, aa

def fit_birt(
    data: VoteMatrix,
    config: SamplerConfig,
    prior_sd: float = 1.0,
    dims: int = 2,
    chain: int = 0,
) -> BirtFit:
    """MH-within-Gibbs for the probit IRT model; steps reuse step_z (ideal points),
    step_w (discrimination) and step_beta (difficulty)."""
    validate_run(data, None, config)
    if not prior_sd > 0:
        raise ContractViolation("prior_sd must be positive")
    stream = CounterStream(config.seed, chain)
    g0 = stream.generator(0, "init")
    n, p = data.cells.shape
    x = 0.1 * g0.standard_normal((n, dims))
    disc = 0.1 * g0.standard_normal((p, dims))
    diff = np.zeros(p)
    cells = data.cells
    steps = {"x": config.step_z, "discrimination": config.step_w, "difficulty": config.step_beta}
    s2 = prior_sd**2
    kept_x, kept_d, kept_a = [], [], []
    after_burnin = Tally()

    logger.info("BIRT chain %d: %dx%d, %d iterations, seed %d", chain, n, p, config.n_iterations, config.seed)
    started = time.perf_counter()
    for t in range(config.n_iterations):
        it = t + 1
        tally = Tally()

        def x_target(xx):
            return _cell_ll(xx @ disc.T - diff[None, :], cells).sum(axis=1) - 0.5 * (xx**2).sum(axis=1) / s2

        x, acc = mh_update_block(x, x_target, steps["x"], stream.generator(it, "birt_x"))
        tally.add("x", acc.sum(), acc.size)

        def disc_target(dd):
            return _cell_ll(x @ dd.T - diff[None, :], cells).sum(axis=0) - 0.5 * (dd**2).sum(axis=1) / s2

        disc, acc = mh_update_block(disc, disc_target, steps["discrimination"], stream.generator(it, "birt_discrimination"))
        tally.add("discrimination", acc.sum(), acc.size)

        xb = x @ disc.T

        def diff_target(a):
            return _cell_ll(xb - a[None, :], cells).sum(axis=0) - 0.5 * a**2 / s2

        diff, acc = mh_update_block(diff, diff_target, steps["difficulty"], stream.generator(it, "birt_difficulty"))
        tally.add("difficulty", acc.sum(), acc.size)

        if t < config.burn_in:
            if config.adapt_during_burnin:
                rates = tally.rates()
                for block, target in BIRT_TARGETS.items():
                    if steps[block] > 0 and block in rates:
                        steps[block] *= float(np.exp((rates[block] - target) / (t + 1) ** 0.6))
            continue
        after_burnin.merge(tally)
        if (t - config.burn_in + 1) % config.thin == 0:
            kept_x.append(x.copy())
            kept_d.append(disc.copy())
            kept_a.append(diff.copy())
    elapsed = time.perf_counter() - started

    xs, ds, as_ = np.stack(kept_x), np.stack(kept_d), np.stack(kept_a)
    ax, ad, aa = align_birt_draws(xs, ds, as_)
    rates = {b: float(min(1.0, max(0.0, r))) for b, r in after_burnin.rates().items()}
    logger.info("BIRT chain %d finished in %.1fs; acceptance %s", chain, elapsed, {b: round(r, 3) for b, r in rates.items()})
    return BirtFit(
        x=xs,
        discrimination=ds,
        difficulty=as_,
        aligned_x=ax,
        aligned_discrimination=ad,
        aligned_difficulty=aa,
        mean_state=BirtState(x=ax.mean(axis=0), discrimination=ad.mean(axis=0), difficulty=aa.mean(axis=0)),
        acceptance_rates=rates,
        seed=config.seed,
        chain=chain,
        config_echo=config,
        elapsed_seconds=elapsed,
    )

def birt_state(x, discrimination, difficulty, data: Optional[VoteMatrix] = None) -> BirtState:
    state = BirtState(
        x=np.atleast_2d(np.asarray(x, dtype=float)),
        discrimination=np.atleast_2d(np.asarray(discrimination, dtype=float)),
        difficulty=np.asarray(difficulty, dtype=float).reshape(-1),
    )
    if data is not None:
        _check(state, data)
    return state
