from typing import List, Literal, Optional, Sequence, Tuple
import numpy as np
from sklearn.metrics import silhouette_samples
from core.errors import ContractViolation
from core.likelihood import probabilities
from core.schema import VoteMatrix, MISSING, YEA
from birt.model import BirtFit, birt_probabilities
from identify.align import AlignedPosterior
from sampler.schema import ChainDraws
from utils.logs import get_logger
from utils.rng import generator_for
from .audit import metric_audit
from .geometry import dimension_spread
from .schema import MetricsReport

logger = get_logger(__name__)

Estimator = Literal["plugin", "draw_average"]

def silhouette(points, labels: Sequence) -> Tuple[np.ndarray, float]:
    """Per-point silhouettes and their mean; singleton clusters score 0."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    labels = np.asarray(labels)
    if labels.shape[0] != points.shape[0]:
        raise ContractViolation(f"{labels.shape[0]} labels for {points.shape[0]} points")
    n_clusters = np.unique(labels).size
    if n_clusters < 2:
        raise ContractViolation("silhouette needs at least two clusters")
    if n_clusters == points.shape[0]:
        per_point = np.zeros(points.shape[0])
    else:
        per_point = silhouette_samples(points, labels, metric="euclidean")
    return per_point, float(per_point.mean())

def predict_proba(fitted) -> np.ndarray:
    """Yea probabilities from a fitted model, a state, or an explicit matrix."""
    if isinstance(fitted, np.ndarray):
        return fitted
    if isinstance(fitted, AlignedPosterior):
        return probabilities(fitted.mean_state)
    if isinstance(fitted, BirtFit):
        return birt_probabilities(fitted.mean_state)
    if isinstance(fitted, dict) and "gamma" in fitted:
        return probabilities(fitted)
    if isinstance(fitted, dict) and "discrimination" in fitted:
        return birt_probabilities(fitted)
    raise ContractViolation(f"cannot predict from {type(fitted).__name__}")

def draw_average_proba(draws) -> np.ndarray:
    """Posterior-mean probabilities averaged over stored draws."""
    if isinstance(draws, ChainDraws):
        return np.mean([probabilities(s) for s in draws.states()], axis=0)
    if isinstance(draws, BirtFit):
        return np.mean([birt_probabilities(draws.draw(d)) for d in range(len(draws))], axis=0)
    raise ContractViolation(f"cannot average draws of {type(draws).__name__}")

def _proba(fitted, estimator: Estimator, draws) -> np.ndarray:
    if estimator == "draw_average":
        source = draws if draws is not None else fitted
        return draw_average_proba(source)
    return predict_proba(fitted)

def _scored_cells(data: VoteMatrix, prob: np.ndarray, mask: Optional[np.ndarray]) -> np.ndarray:
    if prob.shape != data.cells.shape:
        raise ContractViolation(f"fitted model is {prob.shape} but data is {data.cells.shape}")
    cells = data.cells != MISSING
    if mask is not None:
        cells &= np.asarray(mask, dtype=bool)
    return cells

def classification_accuracy(
    fitted,
    data: VoteMatrix,
    estimator: Estimator = "plugin",
    draws=None,
    mask: Optional[np.ndarray] = None,
) -> float:
    """Share of observed cells predicted correctly; Yea predicted when p >= 0.5."""
    prob = _proba(fitted, estimator, draws)
    cells = _scored_cells(data, prob, mask)
    if not cells.any():
        raise ContractViolation("no observed cells to score")
    pred = np.where(prob >= 0.5, YEA, 1 - YEA)
    return float(np.mean(pred[cells] == data.cells[cells]))

def apre(
    fitted,
    data: VoteMatrix,
    estimator: Estimator = "plugin",
    draws=None,
    mask: Optional[np.ndarray] = None,
) -> float:
    """sum_j (minority_j - errors_j) / sum_j minority_j over bills."""
    prob = _proba(fitted, estimator, draws)
    cells = _scored_cells(data, prob, mask)
    if not cells.any():
        raise ContractViolation("no observed cells to score")
    pred = np.where(prob >= 0.5, YEA, 1 - YEA)
    yea = ((data.cells == YEA) & cells).sum(axis=0)
    nay = cells.sum(axis=0) - yea
    minority = np.minimum(yea, nay)
    errors = ((pred != data.cells) & cells).sum(axis=0)
    informative = minority > 0
    total = minority[informative].sum()
    if total == 0:
        logger.warning("no bill has a minority side; APRE undefined")
        return float("nan")
    return float((minority[informative] - errors[informative]).sum() / total)

def gamma_report(chains: List[ChainDraws]) -> Tuple[float, float]:
    """Cross-replication mean and sample SD of per-chain posterior mean gamma."""
    if not chains:
        raise ContractViolation("gamma_report needs at least one chain")
    means = np.array([float(np.mean(c.gamma)) for c in chains])
    sd = float(np.std(means, ddof=1)) if means.size > 1 else 0.0
    return float(means.mean()), sd

def legislator_points(fitted) -> np.ndarray:
    if isinstance(fitted, AlignedPosterior):
        return fitted.mean_state["z"]
    if isinstance(fitted, BirtFit):
        return fitted.mean_state["x"]
    if isinstance(fitted, dict):
        return fitted["z"] if "z" in fitted else fitted["x"]
    raise ContractViolation(f"no legislator positions in {type(fitted).__name__}")

def build_report(
    fitted,
    data: VoteMatrix,
    label_key: Optional[str] = None,
    chains: Optional[List[ChainDraws]] = None,
    estimator: Estimator = "plugin",
    draws=None,
    mask: Optional[np.ndarray] = None,
    audit_triples: int = 1000,
    seed: int = 0,
    method: str = "lsirm",
) -> MetricsReport:
    points = legislator_points(fitted)
    per_point, mean_sil = None, None
    if label_key:
        if not data.labels or label_key not in data.labels:
            raise ContractViolation(f"data carries no '{label_key}' labels")
        per_point, mean_sil = silhouette(points, data.labels[label_key])
    gamma_mean = gamma_sd = None
    if chains:
        gamma_mean, gamma_sd = gamma_report(chains)
    elif isinstance(fitted, AlignedPosterior):
        gamma_mean = float(fitted.mean_state["gamma"])
    audits = {
        form: metric_audit(form, audit_triples, generator_for(seed, "audit", iteration=i)).violations
        for i, form in enumerate(("euclidean", "quadratic", "gaussian_utility"))
    }
    apre_value = apre(fitted, data, estimator, draws, mask)
    return MetricsReport(
        method=method,
        estimator=estimator,
        label_key=label_key,
        silhouette_mean=mean_sil,
        silhouette_per_point=[] if per_point is None else [float(s) for s in per_point],
        accuracy=classification_accuracy(fitted, data, estimator, draws, mask),
        apre=None if np.isnan(apre_value) else apre_value,
        n_cells=int(_scored_cells(data, predict_proba(fitted), mask).sum()),
        gamma_mean=gamma_mean,
        gamma_sd=gamma_sd,
        dimension_sd=[float(s) for s in dimension_spread(points)],
        audit_violations=audits,
    )
