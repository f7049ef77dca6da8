"""Descriptive geometry of a fitted embedding: where groups sit relative to each
other, how spread each axis is, and which bills define an axis."""
from typing import Dict, List, Sequence
import numpy as np
import pandas as pd
from scipy.spatial.distance import cdist
from core.errors import ContractViolation
from core.schema import VoteMatrix

def _as_points(points) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    return points[:, None] if points.ndim == 1 else points

def _grouped(points, labels: Sequence):
    points = _as_points(points)
    labels = np.asarray(labels)
    if labels.shape[0] != points.shape[0]:
        raise ContractViolation(f"{labels.shape[0]} labels for {points.shape[0]} points")
    order = list(dict.fromkeys(labels.tolist()))
    return points, labels, order

def group_centroids(points, labels: Sequence) -> Dict[str, np.ndarray]:
    """Mean position per label, in first-appearance order."""
    points, labels, order = _grouped(points, labels)
    return {str(g): points[labels == g].mean(axis=0) for g in order}

def group_distances(points, labels: Sequence) -> pd.DataFrame:
    """Mean Euclidean distance between members of every pair of groups."""
    points, labels, order = _grouped(points, labels)
    names = [str(g) for g in order]
    table = np.zeros((len(order), len(order)))
    for a, ga in enumerate(order):
        for b, gb in enumerate(order):
            if b < a:
                table[a, b] = table[b, a]
                continue
            d = cdist(points[labels == ga], points[labels == gb])
            if a == b:
                m = d.shape[0]
                table[a, b] = d.sum() / (m * (m - 1)) if m > 1 else 0.0
            else:
                table[a, b] = d.mean()
    return pd.DataFrame(table, index=names, columns=names)

def dimension_spread(points) -> List[float]:
    """Standard deviation of the legislator cloud along each axis."""
    points = _as_points(points)
    if points.shape[0] < 2:
        return [0.0] * points.shape[1]
    return points.std(axis=0, ddof=1).tolist()

def bill_anchors(w, data: VoteMatrix, top_n: int = 5) -> pd.DataFrame:
    """The top_n lowest and highest bills along every axis of the bill positions."""
    w = _as_points(w)
    if w.shape[0] != data.n_bills:
        raise ContractViolation(f"{w.shape[0]} bill positions for {data.n_bills} bills")
    if top_n < 1:
        raise ContractViolation("top_n must be positive")
    meta = data.bill_meta or {}
    rows = []
    for k in range(w.shape[1]):
        order = np.argsort(w[:, k], kind="stable")
        n = min(top_n, order.size)
        for end, picks in (("low", order[:n]), ("high", order[::-1][:n])):
            for rank, j in enumerate(picks, start=1):
                row = {"dim": k + 1, "end": end, "rank": rank, "bill_id": data.bill_ids[j], "coordinate": float(w[j, k])}
                for field, values in meta.items():
                    row[field] = values[j]
                rows.append(row)
    return pd.DataFrame(rows)
