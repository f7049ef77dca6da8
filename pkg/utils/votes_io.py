"""Roll-call ingestion and vote matrix files.

Matrix CSV: header ``legislator_id,<bill_id>...``, one row per legislator,
cells 1 (Yea), 0 (Nay) or NA (Missing). A companion JSON next to it
(same stem) holds labels, bill metadata and provenance.
"""
import json
from collections import Counter
from pathlib import Path
from typing import Optional, Set
import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, model_validator
from core.errors import ContractViolation, DataError
from core.schema import VoteMatrix, MISSING, NAY, YEA
from utils.logs import get_logger
from utils.rng import generator_for

logger = get_logger(__name__)

class IngestConfig(BaseModel):
    """Voteview cast-code mapping and bill filtering."""
    yea_codes: Set[int] = Field(default_factory=lambda: {1, 2, 3})
    nay_codes: Set[int] = Field(default_factory=lambda: {4, 5, 6})
    missing_codes: Set[int] = Field(default_factory=lambda: {7, 8, 9, 0})
    lopsided_threshold: float = Field(0.025, ge=0.0, lt=0.5)
    drop_empty: bool = True
    legislator_column: str = "icpsr"
    bill_column: str = "rollnumber"
    code_column: str = "cast_code"

    @model_validator(mode="after")
    def _disjoint(self):
        sets = (self.yea_codes, self.nay_codes, self.missing_codes)
        if any(a & b for i, a in enumerate(sets) for b in sets[i + 1:]):
            raise ValueError("yea, nay and missing code sets must be disjoint")
        return self

def _companion(path: Path) -> Path:
    return path.with_suffix(".json")

def ingest_votes(votes_file, config: Optional[IngestConfig] = None) -> VoteMatrix:
    """Pivot long-format (legislator, bill, cast code) records into a VoteMatrix."""
    config = config or IngestConfig()
    cols = [config.legislator_column, config.bill_column, config.code_column]
    try:
        frame = pd.read_csv(votes_file, dtype={config.legislator_column: str, config.bill_column: str})
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataError(f"cannot parse {votes_file}: {e}") from e
    missing_cols = [c for c in cols if c not in frame.columns]
    if missing_cols:
        raise DataError(f"{votes_file} lacks columns {missing_cols}")
    frame = frame[cols].dropna(subset=cols[:2])

    dup = frame.duplicated(subset=cols[:2], keep=False)
    if dup.any():
        first = frame[dup].iloc[0]
        raise DataError(f"{int(dup.sum())} duplicate records, e.g. legislator {first.iloc[0]} on bill {first.iloc[1]}")

    codes = pd.to_numeric(frame[config.code_column], errors="coerce")
    value = np.full(len(frame), MISSING, dtype=np.int8)
    value[codes.isin(config.yea_codes).to_numpy()] = YEA
    value[codes.isin(config.nay_codes).to_numpy()] = NAY
    known = codes.isin(config.yea_codes | config.nay_codes | config.missing_codes)
    if not known.all():
        unknown = Counter(frame.loc[~known, config.code_column].astype(str))
        logger.warning("%d records with unknown cast codes mapped to Missing: %s", int((~known).sum()), dict(unknown))

    frame = frame.assign(value=value)
    if config.drop_empty:
        frame = frame[frame["value"] != MISSING]
    if frame.empty:
        raise DataError(f"empty result: no usable votes in {votes_file}")

    wide = frame.pivot(index=config.legislator_column, columns=config.bill_column, values="value")
    wide = wide.reindex(index=_natural(wide.index), columns=_natural(wide.columns))
    cells = wide.fillna(MISSING).to_numpy(dtype=np.int8)
    if not (cells != MISSING).any():
        raise DataError(f"empty result: no usable votes in {votes_file}")
    data = drop_unobserved(VoteMatrix(
        cells=cells,
        legislator_ids=[str(i) for i in wide.index],
        bill_ids=[str(j) for j in wide.columns],
        provenance={"ingest": {"source": str(votes_file), "config": config.model_dump(mode="json")}},
    ))
    logger.info("ingested %d legislators x %d bills (%d observed votes)", data.n_legislators, data.n_bills, data.n_observed())
    return data

def _natural(labels) -> list:
    """Numeric ids in numeric order, everything else lexicographic after them."""
    def key(x):
        s = str(x)
        return (0, int(s), s) if s.lstrip("-").isdigit() else (1, 0, s)
    return sorted(labels, key=key)

def drop_unobserved(data: VoteMatrix) -> VoteMatrix:
    """Remove legislators and bills without a single observed vote."""
    observed = data.observed_mask()
    rows, cols = observed.any(axis=1), observed.any(axis=0)
    if rows.all() and cols.all():
        return data
    logger.warning(
        "dropped %d legislators and %d bills with no observed votes", int((~rows).sum()), int((~cols).sum())
    )
    return data.subset(rows=rows, cols=cols)

def minority_share(data: VoteMatrix) -> np.ndarray:
    observed = data.observed_mask()
    n_obs = observed.sum(axis=0)
    yea = (data.cells == YEA).sum(axis=0)
    minority = np.minimum(yea, n_obs - yea)
    return np.divide(minority, n_obs, out=np.zeros(data.n_bills), where=n_obs > 0)

def filter_lopsided(data: VoteMatrix, threshold: float = 0.025) -> VoteMatrix:
    """Drop bills whose observed minority share is below threshold."""
    if not 0.0 <= threshold < 0.5:
        raise ContractViolation(f"threshold must lie in [0, 0.5), got {threshold}")
    keep = minority_share(data) >= threshold
    logger.info("lopsided filter at %.3f: kept %d bills, dropped %d", threshold, int(keep.sum()), int((~keep).sum()))
    if not keep.any():
        raise DataError(f"every bill falls below the lopsided threshold {threshold}")
    if keep.all():
        return drop_unobserved(data)
    filtered = drop_unobserved(data.subset(cols=keep))
    filtered.provenance["lopsided_threshold"] = threshold
    return filtered

def write_vote_matrix(data: VoteMatrix, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    values = np.where(data.cells == MISSING, None, data.cells.astype(object))
    frame = pd.DataFrame(values, columns=data.bill_ids)
    frame.insert(0, "legislator_id", data.legislator_ids)
    frame.to_csv(path, index=False, na_rep="NA", lineterminator="\n")
    meta = {"labels": data.labels, "bill_meta": data.bill_meta, "provenance": data.provenance}
    _companion(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path

def read_vote_matrix(path) -> VoteMatrix:
    path = Path(path)
    if not path.exists():
        raise DataError(f"no vote matrix at {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataError(f"cannot parse {path}: {e}") from e
    if frame.columns[0] != "legislator_id":
        raise DataError(f"{path} does not start with a legislator_id column")
    body = frame.iloc[:, 1:].replace("NA", str(MISSING))
    try:
        cells = body.to_numpy().astype(np.int64)
    except ValueError as e:
        raise DataError(f"{path} holds a cell that is not 1, 0 or NA: {e}") from e
    meta = {}
    if _companion(path).exists():
        meta = json.loads(_companion(path).read_text())
    try:
        return VoteMatrix(
            cells=cells,
            legislator_ids=frame["legislator_id"].tolist(),
            bill_ids=list(frame.columns[1:]),
            labels=meta.get("labels"),
            bill_meta=meta.get("bill_meta"),
            provenance=meta.get("provenance") or {},
        )
    except ValueError as e:
        raise DataError(f"{path}: {e}") from e

def holdout_mask(data: VoteMatrix, frac: float, seed: int) -> np.ndarray:
    """Seeded selection of round(frac * observed) observed cells."""
    if not 0.0 < frac < 1.0:
        raise ContractViolation(f"holdout fraction must lie in (0, 1), got {frac}")
    observed = np.flatnonzero(data.observed_mask().ravel())
    n_hold = int(round(frac * observed.size))
    if n_hold < 1 or n_hold >= observed.size:
        raise DataError(f"holdout fraction {frac} leaves no cells on one side of the split")
    chosen = generator_for(seed, "holdout").choice(observed, size=n_hold, replace=False)
    mask = np.zeros(data.cells.size, dtype=bool)
    mask[chosen] = True
    return mask.reshape(data.cells.shape)

def mask_cells(data: VoteMatrix, mask: np.ndarray) -> VoteMatrix:
    cells = data.cells.copy()
    cells[mask] = MISSING
    return data.with_cells(cells)

def write_holdout(data: VoteMatrix, mask: np.ndarray, path) -> Path:
    """legislator_id,bill_id,vote for every held-out cell."""
    path = Path(path)
    rows, cols = np.nonzero(mask)
    pd.DataFrame({
        "legislator_id": [data.legislator_ids[i] for i in rows],
        "bill_id": [data.bill_ids[j] for j in cols],
        "vote": data.cells[rows, cols].astype(int),
    }).to_csv(path, index=False, lineterminator="\n")
    return path

def read_holdout(path, data: VoteMatrix) -> tuple[np.ndarray, VoteMatrix]:
    """Mask of held-out cells and the data with their votes restored."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"no holdout file at {path}")
    frame = pd.read_csv(path, dtype={"legislator_id": str, "bill_id": str})
    row = {k: i for i, k in enumerate(data.legislator_ids)}
    col = {k: j for j, k in enumerate(data.bill_ids)}
    try:
        rows = np.array([row[k] for k in frame["legislator_id"]], dtype=int)
        cols = np.array([col[k] for k in frame["bill_id"]], dtype=int)
    except KeyError as e:
        raise DataError(f"holdout cell {e} is not in the vote matrix") from e
    mask = np.zeros(data.cells.shape, dtype=bool)
    mask[rows, cols] = True
    cells = data.cells.copy()
    cells[rows, cols] = frame["vote"].to_numpy(dtype=np.int8)
    return mask, data.with_cells(cells)
