from typing import Any, Dict, List, Optional
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

YEA = 1
NAY = 0
MISSING = -1

class Hyperparams(BaseModel):
    """Fixed prior constants. sigma_beta_sq has no hyperprior."""
    k: int = Field(2, ge=1)
    sigma_beta_sq: float = Field(1.0, gt=0)
    a_sigma: float = Field(1.0, gt=0)
    b_sigma: float = Field(1.0, gt=0)
    mu_gamma: float = 0.0
    sigma_gamma_sq: float = Field(1.0, gt=0)

class VoteMatrix(BaseModel):
    """N x P ternary vote matrix (Yea=1, Nay=0, Missing=-1)."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    cells: np.ndarray
    legislator_ids: List[str]
    bill_ids: List[str]
    labels: Optional[Dict[str, List[str]]] = None
    bill_meta: Optional[Dict[str, List[str]]] = None
    provenance: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("cells", mode="before")
    @classmethod
    def _as_int8(cls, v):
        arr = np.asarray(v)
        if arr.ndim != 2:
            raise ValueError(f"cells must be 2-D, got shape {arr.shape}")
        if arr.size and not np.isin(arr, (YEA, NAY, MISSING)).all():
            raise ValueError("cells may only hold 1 (Yea), 0 (Nay) or -1 (Missing)")
        return arr.astype(np.int8, copy=True)

    @model_validator(mode="after")
    def _check_dims(self):
        n, p = self.cells.shape
        if n < 1 or p < 1:
            raise ValueError("vote matrix needs at least one legislator and one bill")
        if len(self.legislator_ids) != n or len(self.bill_ids) != p:
            raise ValueError("identifier lists must match the cell dimensions")
        if len(set(self.legislator_ids)) != n:
            raise ValueError("duplicate legislator ids")
        if len(set(self.bill_ids)) != p:
            raise ValueError("duplicate bill ids")
        for name, values in (self.labels or {}).items():
            if len(values) != n:
                raise ValueError(f"label '{name}' has {len(values)} entries for {n} legislators")
        for name, values in (self.bill_meta or {}).items():
            if len(values) != p:
                raise ValueError(f"bill field '{name}' has {len(values)} entries for {p} bills")
        return self

    @property
    def n_legislators(self) -> int:
        return int(self.cells.shape[0])

    @property
    def n_bills(self) -> int:
        return int(self.cells.shape[1])

    def observed_mask(self) -> np.ndarray:
        return self.cells != MISSING

    def n_observed(self) -> int:
        return int(self.observed_mask().sum())

    def subset(self, rows=None, cols=None) -> "VoteMatrix":
        """Keep the given row/column indices (or boolean masks); metadata follows."""
        rows = np.arange(self.n_legislators) if rows is None else np.flatnonzero(_as_index_mask(rows, self.n_legislators))
        cols = np.arange(self.n_bills) if cols is None else np.flatnonzero(_as_index_mask(cols, self.n_bills))
        return VoteMatrix(
            cells=self.cells[np.ix_(rows, cols)],
            legislator_ids=[self.legislator_ids[i] for i in rows],
            bill_ids=[self.bill_ids[j] for j in cols],
            labels={k: [v[i] for i in rows] for k, v in self.labels.items()} if self.labels else None,
            bill_meta={k: [v[j] for j in cols] for k, v in self.bill_meta.items()} if self.bill_meta else None,
            provenance=dict(self.provenance),
        )

    def with_cells(self, cells: np.ndarray) -> "VoteMatrix":
        return VoteMatrix(
            cells=cells,
            legislator_ids=list(self.legislator_ids),
            bill_ids=list(self.bill_ids),
            labels=self.labels,
            bill_meta=self.bill_meta,
            provenance=dict(self.provenance),
        )

def _as_index_mask(sel, n: int) -> np.ndarray:
    sel = np.asarray(sel)
    if sel.dtype == bool:
        return sel
    mask = np.zeros(n, dtype=bool)
    mask[sel.astype(int)] = True
    return mask
