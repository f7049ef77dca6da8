"""Post-processing that removes the rotation / reflection / translation freedom
of the latent positions before posterior summaries are taken.

Legislators and bills share one space, so the centroid and covariance that
define the frame are computed over all N + P points together.
"""
from typing import Any, Dict, List, NamedTuple, Optional
import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict
from scipy.linalg import orthogonal_procrustes
from scipy.stats import skew
from core.errors import ContractViolation
from core.state import ModelState
from sampler.schema import ChainDraws
from utils.logs import get_logger

logger = get_logger(__name__)

class Positions(NamedTuple):
    z: np.ndarray
    w: np.ndarray
    rank_deficient: bool = False

def _stack(config: Positions) -> np.ndarray:
    return np.vstack([config.z, config.w])

def _split(config: Positions, points: np.ndarray, rank_deficient: bool = False) -> Positions:
    n = config.z.shape[0]
    return Positions(points[:n], points[n:], rank_deficient or config.rank_deficient)

def center(config: Positions) -> Positions:
    points = _stack(config)
    if points.shape[0] < 1:
        raise ContractViolation("nothing to center")
    return _split(config, points - points.mean(axis=0))

def principal_axes_rotate(config: Positions, tol: float = 1e-12) -> Positions:
    """Express a centered configuration in the eigenbasis of its joint covariance
    (decreasing eigenvalues); flip every axis on which legislator skewness is < 0."""
    points = _stack(config)
    k = points.shape[1]
    cov = points.T @ points / points.shape[0]
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(-evals, kind="stable")
    evals, evecs = evals[order], evecs[:, order]
    rank_deficient = bool(np.sum(evals > tol * max(evals[0], tol)) < k)
    if rank_deficient:
        logger.warning("alignment frame is rank deficient (eigenvalues %s); trailing axes are arbitrary", evals)
    rotated = points @ evecs
    n = config.z.shape[0]
    if n > 0:
        with np.errstate(invalid="ignore", divide="ignore"):
            sk = skew(rotated[:n], axis=0)
        flip = np.where(np.nan_to_num(sk, nan=0.0) < 0, -1.0, 1.0)
        rotated = rotated * flip
    return _split(config, rotated, rank_deficient)

def procrustes_transform(x: np.ndarray, y: np.ndarray):
    """(q, mx, my) such that (x - mx) @ q + my is the best orthogonal-plus-shift fit to y."""
    if x.shape != y.shape:
        raise ContractViolation(f"draw {x.shape} and reference {y.shape} differ in shape")
    mx, my = x.mean(axis=0), y.mean(axis=0)
    q, _ = orthogonal_procrustes(x - mx, y - my)
    return q, mx, my

def procrustes_align(draw: Positions, reference: Positions) -> Positions:
    """Orthogonal Q and shift c minimizing ||(X Q + c) - Y||_F over Z and W jointly."""
    x = _stack(draw)
    q, mx, my = procrustes_transform(x, _stack(reference))
    return _split(draw, (x - mx) @ q + my)

class AlignedPosterior(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    mean_state: Dict[str, Any]  # ModelState
    sd_z: np.ndarray
    sd_w: np.ndarray
    reference: Any  # Positions
    reference_index: int
    aligned_z: Optional[np.ndarray] = None  # (D, N, K)
    aligned_w: Optional[np.ndarray] = None  # (D, P, K)
    n_draws: int

def summarize(chain: ChainDraws, reference_index: int = -1, keep_draws: bool = False) -> AlignedPosterior:
    """Align every draw to the (centered, principal-axes) reference draw, then average.
    theta, beta, gamma and sigma_theta^2 are averaged as stored."""
    d = len(chain)
    if d < 2:
        raise ContractViolation(f"summarize needs at least 2 draws, got {d}")
    ref_idx = reference_index % d
    reference = principal_axes_rotate(center(Positions(chain.z[ref_idx], chain.w[ref_idx])))
    zs = np.empty_like(chain.z)
    ws = np.empty_like(chain.w)
    for i in range(d):
        aligned = procrustes_align(Positions(chain.z[i], chain.w[i]), reference)
        zs[i], ws[i] = aligned.z, aligned.w
    mean_state = ModelState(
        theta=chain.theta.mean(axis=0),
        beta=chain.beta.mean(axis=0),
        gamma=float(np.mean(chain.gamma)),
        z=zs.mean(axis=0),
        w=ws.mean(axis=0),
        sigma_theta_sq=float(np.mean(chain.sigma_theta_sq)),
    )
    return AlignedPosterior(
        mean_state=mean_state,
        sd_z=zs.std(axis=0, ddof=1),
        sd_w=ws.std(axis=0, ddof=1),
        reference=reference,
        reference_index=ref_idx,
        aligned_z=zs if keep_draws else None,
        aligned_w=ws if keep_draws else None,
        n_draws=d,
    )

def aligned_table(aligned: AlignedPosterior, legislator_ids: List[str], bill_ids: List[str]) -> pd.DataFrame:
    """node_id, node_type, dim_1..dim_K, sd_1..sd_K"""
    z, w = aligned.mean_state["z"], aligned.mean_state["w"]
    k = z.shape[1]
    coords = np.vstack([z, w])
    sds = np.vstack([aligned.sd_z, aligned.sd_w])
    table = pd.DataFrame({
        "node_id": list(legislator_ids) + list(bill_ids),
        "node_type": ["legislator"] * len(legislator_ids) + ["bill"] * len(bill_ids),
    })
    for d in range(k):
        table[f"dim_{d + 1}"] = coords[:, d]
    for d in range(k):
        table[f"sd_{d + 1}"] = sds[:, d]
    return table
