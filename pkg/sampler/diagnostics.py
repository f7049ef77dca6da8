import math
from typing import Dict, Optional
import numpy as np
from pydantic import BaseModel
from core.errors import ContractViolation
from utils.logs import get_logger
from .schema import ChainDraws

logger = get_logger(__name__)

MIN_DRAWS = 10

class BlockDiagnostics(BaseModel):
    n_series: int
    ess_min: Optional[float]
    ess_median: Optional[float]
    geweke_max_abs: Optional[float]
    trace_min: float
    trace_max: float
    n_degenerate: int

def _autocorrelation(x: np.ndarray) -> np.ndarray:
    n = x.size
    xc = x - x.mean()
    f = np.fft.rfft(xc, n=2 * n)
    acov = np.fft.irfft(f * np.conj(f), n=2 * n)[:n] / n
    return acov / acov[0]

def _ess(x: np.ndarray) -> float:
    n = x.size
    if n < 2 or not np.all(np.isfinite(x)) or np.ptp(x) == 0:
        return math.nan
    rho = _autocorrelation(x)
    m = n // 2
    pairs = rho[0 : 2 * m : 2] + rho[1 : 2 * m : 2]
    stop = np.flatnonzero(pairs <= 0)
    pairs = pairs[: stop[0]] if stop.size else pairs
    # initial monotone sequence
    pairs = np.minimum.accumulate(pairs)
    tau = -1.0 + 2.0 * pairs.sum()
    # anti-correlated chains can push tau to 0 or below; cap ESS at n log10 n
    tau = max(tau, 1.0 / math.log10(max(n, 10)))
    return n / tau

def effective_sample_size(x) -> float:
    """ESS from Geyer's initial positive sequence. nan for a constant chain."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size < MIN_DRAWS:
        raise ContractViolation(f"need at least {MIN_DRAWS} draws, got {x.size}")
    return _ess(x)

def geweke_z(x, first: float = 0.1, last: float = 0.5) -> float:
    """Mean of the first 10% against the last 50%, with ESS-based standard errors."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size < MIN_DRAWS:
        raise ContractViolation(f"need at least {MIN_DRAWS} draws, got {x.size}")
    a = x[: max(2, int(first * x.size))]
    b = x[int((1.0 - last) * x.size) :]
    var_terms = []
    for seg in (a, b):
        v = seg.var(ddof=1)
        if v == 0:
            return math.nan
        ess = _ess(seg)
        var_terms.append(v / (ess if np.isfinite(ess) else seg.size))
    return float((a.mean() - b.mean()) / math.sqrt(sum(var_terms)))

def _block(series: np.ndarray) -> BlockDiagnostics:
    """series: (D, M) -- M scalar traces of length D."""
    ess = np.array([_ess(series[:, m]) for m in range(series.shape[1])])
    gz = np.array([geweke_z(series[:, m]) for m in range(series.shape[1])])
    degenerate = int(np.isnan(ess).sum())
    finite_ess = ess[np.isfinite(ess)]
    finite_gz = np.abs(gz[np.isfinite(gz)])
    return BlockDiagnostics(
        n_series=int(series.shape[1]),
        ess_min=float(finite_ess.min()) if finite_ess.size else None,
        ess_median=float(np.median(finite_ess)) if finite_ess.size else None,
        geweke_max_abs=float(finite_gz.max()) if finite_gz.size else None,
        trace_min=float(series.min()),
        trace_max=float(series.max()),
        n_degenerate=degenerate,
    )

def diagnostics(chain: ChainDraws) -> Dict[str, BlockDiagnostics]:
    """ESS, Geweke z and trace extrema per parameter block."""
    d = len(chain)
    if d < MIN_DRAWS:
        raise ContractViolation(f"need at least {MIN_DRAWS} draws, got {d}")
    blocks = {
        "theta": chain.theta,
        "beta": chain.beta,
        "gamma": chain.gamma[:, None],
        "sigma_theta_sq": chain.sigma_theta_sq[:, None],
        "z": chain.z.reshape(d, -1),
        "w": chain.w.reshape(d, -1),
    }
    out = {name: _block(series) for name, series in blocks.items()}
    for name, diag in out.items():
        if diag.n_degenerate:
            logger.warning("%s: %d of %d traces are constant; ESS undefined", name, diag.n_degenerate, diag.n_series)
    return out
