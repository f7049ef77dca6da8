import math
import numpy as np
from scipy import stats
from scipy.spatial.distance import cdist
from scipy.special import expit
from .errors import ContractViolation
from .schema import Hyperparams, VoteMatrix, YEA, NAY
from .state import ModelState, check_state

def euclidean_distance(a, b) -> float:
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    if a.shape != b.shape or a.size < 1:
        raise ContractViolation(f"vectors must share a length >= 1, got {a.size} and {b.size}")
    return float(np.linalg.norm(a - b))

def distance_matrix(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """(N, P) legislator-to-bill distances."""
    return cdist(z, w, metric="euclidean")

def linear_predictor(state: ModelState, dist: np.ndarray | None = None) -> np.ndarray:
    """eta_ij = theta_i + beta_j - gamma * ||z_i - w_j||"""
    if dist is None:
        dist = distance_matrix(state["z"], state["w"])
    return state["theta"][:, None] + state["beta"][None, :] - state["gamma"] * dist

def probabilities(state: ModelState) -> np.ndarray:
    return expit(linear_predictor(state))

def log_likelihood_matrix(eta: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Bernoulli log-mass per cell under the logistic link.
    log P(Yea) = -log(1 + e^-eta), log P(Nay) = -log(1 + e^eta); logaddexp keeps
    both finite for large |eta|. Cells with y outside {0, 1} are not masked here.
    """
    return -np.logaddexp(0.0, np.where(y == YEA, -eta, eta))

def log_likelihood_cell(state: ModelState, i: int, j: int, y: int) -> float:
    if y not in (YEA, NAY):
        raise ContractViolation("log_likelihood_cell needs an observed vote (Yea or Nay)")
    n, p = state["z"].shape[0], state["w"].shape[0]
    if not (0 <= i < n and 0 <= j < p):
        raise ContractViolation(f"cell ({i}, {j}) outside a {n}x{p} model")
    d = euclidean_distance(state["z"][i], state["w"][j])
    eta = state["theta"][i] + state["beta"][j] - state["gamma"] * d
    return float(-np.logaddexp(0.0, -eta if y == YEA else eta))

def log_likelihood(state: ModelState, data: VoteMatrix) -> float:
    """Sum over observed cells; Missing cells contribute 0."""
    check_state(state, data)
    mask = data.observed_mask()
    if not mask.any():
        return 0.0
    ll = log_likelihood_matrix(linear_predictor(state), data.cells)
    # compensated sum: the same cells give the same total in any layout
    return math.fsum(ll[mask].tolist())

def log_prior(state: ModelState, hyper: Hyperparams) -> float:
    """Normal priors on theta (var sigma_theta_sq) and beta (var sigma_beta_sq),
    standard MVN on every z_i and w_j, lognormal on gamma (log-gamma Normal plus
    the -log gamma Jacobian), Inverse-Gamma(a_sigma, b_sigma) on sigma_theta_sq."""
    check_state(state, hyper=hyper)
    gamma = state["gamma"]
    s2 = state["sigma_theta_sq"]
    terms = [
        stats.norm.logpdf(state["theta"], 0.0, math.sqrt(s2)).sum(),
        stats.norm.logpdf(state["beta"], 0.0, math.sqrt(hyper.sigma_beta_sq)).sum(),
        stats.norm.logpdf(state["z"]).sum(),
        stats.norm.logpdf(state["w"]).sum(),
        stats.norm.logpdf(math.log(gamma), hyper.mu_gamma, math.sqrt(hyper.sigma_gamma_sq)) - math.log(gamma),
        stats.invgamma.logpdf(s2, hyper.a_sigma, scale=hyper.b_sigma),
    ]
    return math.fsum(float(t) for t in terms)

def log_posterior(state: ModelState, data: VoteMatrix, hyper: Hyperparams) -> float:
    """Unnormalized log posterior."""
    return log_likelihood(state, data) + log_prior(state, hyper)
