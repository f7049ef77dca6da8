from typing import Callable, Tuple
import numpy as np
from scipy import stats
from scipy.special import expit
from core.errors import ContractViolation
from core.likelihood import euclidean_distance
from core.schema import YEA, NAY, MISSING
from core.state import ModelState

def _check_step(step: float):
    if not step >= 0:
        raise ContractViolation(f"step must be non-negative, got {step}")

def mh_update_scalar(
    current: float,
    log_target: Callable[[float], float],
    step: float,
    rng: np.random.Generator,
) -> Tuple[float, bool]:
    """Random-walk Metropolis step with a Normal(0, step^2) proposal.
    Draw order is fixed (normal, then uniform) so replays line up."""
    _check_step(step)
    lp_cur = log_target(current)
    if not np.isfinite(lp_cur):
        raise ContractViolation(f"log target is not finite at the current value {current}")
    proposal = current + step * rng.standard_normal()
    log_u = np.log(rng.random())
    lp_prop = log_target(proposal)
    if not np.isfinite(lp_prop):
        return current, False
    if log_u < lp_prop - lp_cur:
        return proposal, True
    return current, False

def mh_update_vector(
    current: np.ndarray,
    log_target: Callable[[np.ndarray], float],
    step: float,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, bool]:
    """Spherical Normal(0, step^2 I_K) proposal; K=1 consumes the stream
    exactly like mh_update_scalar."""
    _check_step(step)
    current = np.asarray(current, dtype=float)
    lp_cur = log_target(current)
    if not np.isfinite(lp_cur):
        raise ContractViolation("log target is not finite at the current value")
    proposal = current + step * rng.standard_normal(current.shape)
    log_u = np.log(rng.random())
    lp_prop = log_target(proposal)
    if not np.isfinite(lp_prop):
        return current, False
    if log_u < lp_prop - lp_cur:
        return proposal, True
    return current, False

def block_draws(rng: np.random.Generator, shape: Tuple[int, ...], step: float) -> Tuple[np.ndarray, np.ndarray]:
    """Proposal increments and log-uniforms for a whole block; row i belongs to index i."""
    _check_step(step)
    eps = step * rng.standard_normal(shape)
    log_u = np.log(rng.random(shape[0]))
    return eps, log_u

def mh_update_block(
    current: np.ndarray,
    log_target_rows: Callable[[np.ndarray], np.ndarray],
    step: float,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray]:
    """Independent MH updates of every row of `current` at once.

    log_target_rows maps an array shaped like `current` to one conditional
    log density per row; rows must not interact (disjoint data slices).
    Row i is the mh_update_vector step fed row i of block_draws."""
    eps, log_u = block_draws(rng, current.shape, step)
    proposal = current + eps
    lp_cur = log_target_rows(current)
    lp_prop = log_target_rows(proposal)
    with np.errstate(invalid="ignore"):
        accept = np.isfinite(lp_prop) & (log_u < lp_prop - lp_cur)
    mask = accept if current.ndim == 1 else accept[:, None]
    return np.where(mask, proposal, current), accept

def gibbs_update_sigma_theta(theta, a_sigma: float, b_sigma: float, rng: np.random.Generator, size=None):
    """Exact draw from Inv-Gamma(N/2 + a_sigma, sum(theta^2)/2 + b_sigma)."""
    if not (a_sigma > 0 and b_sigma > 0):
        raise ContractViolation("a_sigma and b_sigma must be positive")
    theta = np.asarray(theta, dtype=float)
    shape = theta.size / 2.0 + a_sigma
    scale = 0.5 * float(np.dot(theta, theta)) + b_sigma
    draw = stats.invgamma.rvs(shape, scale=scale, size=size, random_state=rng)
    return float(draw) if size is None else np.asarray(draw)

def impute_missing_cell(state: ModelState, i: int, j: int, rng: np.random.Generator) -> int:
    """Yea with probability logistic(theta_i + beta_j - gamma ||z_i - w_j||)."""
    eta = state["theta"][i] + state["beta"][j] - state["gamma"] * euclidean_distance(state["z"][i], state["w"][j])
    return YEA if rng.random() < expit(eta) else NAY

def impute_missing(cells: np.ndarray, eta: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Fill every Missing cell from the logistic model; observed cells are kept."""
    u = rng.random(cells.shape)
    draws = np.where(u < expit(eta), YEA, NAY).astype(np.int8)
    return np.where(cells == MISSING, draws, cells).astype(np.int8)
