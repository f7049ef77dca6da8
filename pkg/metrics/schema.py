from typing import Dict, List, Literal, Optional
from pydantic import BaseModel, Field

AuditForm = Literal["euclidean", "quadratic", "gaussian_utility"]

class AuditResult(BaseModel):
    form: AuditForm
    n_triples: int
    violations: int             # random triples + fixed witnesses
    witness_violations: int
    same_sign_share: Optional[float] = None  # violating random triples with (x-y)(y-z) > 0

class MetricsReport(BaseModel):
    method: str = "lsirm"
    estimator: Literal["plugin", "draw_average"] = "plugin"
    label_key: Optional[str] = None
    silhouette_mean: Optional[float] = Field(None, ge=-1.0, le=1.0)
    silhouette_per_point: List[float] = Field(default_factory=list)
    accuracy: float = Field(ge=0.0, le=1.0)
    apre: Optional[float] = Field(None, le=1.0)
    n_cells: int = 0
    gamma_mean: Optional[float] = Field(None, gt=0.0)
    gamma_sd: Optional[float] = Field(None, ge=0.0)
    dimension_sd: List[float] = Field(default_factory=list)
    audit_violations: Dict[str, int] = Field(default_factory=dict)
