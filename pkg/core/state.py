from typing import TypedDict, Optional
import numpy as np
from .errors import ContractViolation
from .schema import Hyperparams, VoteMatrix, MISSING

class ModelState(TypedDict):
    """One full parameter configuration of the latent space model.
    - theta: (N,) legislator baseline propensity
    - beta: (P,) bill baseline popularity
    - gamma: proximity strength (> 0)
    - z: (N, K) legislator positions
    - w: (P, K) bill positions
    - sigma_theta_sq: variance of the theta prior (> 0)
    """
    theta: np.ndarray
    beta: np.ndarray
    gamma: float
    z: np.ndarray
    w: np.ndarray
    sigma_theta_sq: float

def make_state(theta, beta, gamma, z, w, sigma_theta_sq) -> ModelState:
    state = ModelState(
        theta=np.asarray(theta, dtype=float).reshape(-1),
        beta=np.asarray(beta, dtype=float).reshape(-1),
        gamma=float(gamma),
        z=np.atleast_2d(np.asarray(z, dtype=float)),
        w=np.atleast_2d(np.asarray(w, dtype=float)),
        sigma_theta_sq=float(sigma_theta_sq),
    )
    check_state(state)
    return state

def copy_state(state: ModelState) -> ModelState:
    return ModelState(
        theta=state["theta"].copy(),
        beta=state["beta"].copy(),
        gamma=float(state["gamma"]),
        z=state["z"].copy(),
        w=state["w"].copy(),
        sigma_theta_sq=float(state["sigma_theta_sq"]),
    )

def check_state(state: ModelState, data: Optional[VoteMatrix] = None, hyper: Optional[Hyperparams] = None):
    if not state["gamma"] > 0:
        raise ContractViolation(f"gamma must be positive, got {state['gamma']}")
    if not state["sigma_theta_sq"] > 0:
        raise ContractViolation(f"sigma_theta_sq must be positive, got {state['sigma_theta_sq']}")
    z, w = state["z"], state["w"]
    if z.ndim != 2 or w.ndim != 2 or z.shape[1] != w.shape[1]:
        raise ContractViolation(f"z {z.shape} and w {w.shape} must share the latent dimension")
    if z.shape[0] != state["theta"].shape[0] or w.shape[0] != state["beta"].shape[0]:
        raise ContractViolation("position rows must match theta/beta lengths")
    if data is not None and (z.shape[0], w.shape[0]) != data.cells.shape:
        raise ContractViolation(f"state is {z.shape[0]}x{w.shape[0]} but data is {data.cells.shape}")
    if hyper is not None and z.shape[1] != hyper.k:
        raise ContractViolation(f"state has K={z.shape[1]} but hyperparameters say K={hyper.k}")

def pca_positions(data: VoteMatrix, k: int) -> np.ndarray:
    """First k principal directions of the double-centered +/-1 vote matrix
    (Missing -> 0), scaled to unit variance per axis."""
    y = np.where(data.cells == MISSING, 0.0, np.where(data.cells == 1, 1.0, -1.0))
    y = y - y.mean(axis=0, keepdims=True) - y.mean(axis=1, keepdims=True) + y.mean()
    u, s, _ = np.linalg.svd(y, full_matrices=False)
    z = u[:, :k] * s[:k]
    if z.shape[1] < k:
        z = np.hstack([z, np.zeros((z.shape[0], k - z.shape[1]))])
    sd = z.std(axis=0)
    sd[sd == 0] = 1.0
    return z / sd

def initial_state(
    n: int,
    p: int,
    hyper: Hyperparams,
    rng: np.random.Generator,
    data: Optional[VoteMatrix] = None,
    init: str = "random",
) -> ModelState:
    """theta, beta at 0; gamma at exp(mu_gamma); Z, W ~ 0.1 * N(0, I).
    init='pca' replaces Z with the scaled principal directions of the data."""
    z = 0.1 * rng.standard_normal((n, hyper.k))
    w = 0.1 * rng.standard_normal((p, hyper.k))
    if init == "pca":
        if data is None:
            raise ContractViolation("pca initialization needs the vote matrix")
        z = pca_positions(data, hyper.k)
    elif init != "random":
        raise ContractViolation(f"unknown initialization '{init}'")
    return ModelState(
        theta=np.zeros(n),
        beta=np.zeros(p),
        gamma=float(np.exp(hyper.mu_gamma)),
        z=z,
        w=w,
        sigma_theta_sq=1.0,
    )
