from typing import List, Optional
from pydantic import BaseModel, Field, field_validator
from core.schema import Hyperparams
from sampler.schema import SamplerConfig
from simgen.schema import ScenarioSpec

# Ground-truth label used for silhouettes when a job does not name one
DEFAULT_LABELS = {
    "cohesion_gradient": "group",
    "cluster_recovery": "cluster",
    "agenda_sweep": "faction",
    "noise_sweep": "faction",
    "cross_party": "faction",
    "four_coalition_demo": "faction",
}

class ReplicationJob(BaseModel):
    """One scenario fitted once per seed; the seed drives both the data and the chains."""
    scenario: ScenarioSpec
    seeds: List[int] = Field(default_factory=lambda: [0])
    sampler: SamplerConfig = Field(default_factory=SamplerConfig)
    hyper: Hyperparams = Field(default_factory=Hyperparams)
    include_birt: bool = True
    birt_prior_sd: float = Field(1.0, gt=0)
    label_key: Optional[str] = None
    audit_triples: int = Field(1000, ge=1)

    @field_validator("seeds")
    @classmethod
    def _seeds(cls, v):
        if not v:
            raise ValueError("at least one seed is required")
        if len(set(v)) != len(v):
            raise ValueError("seeds must be distinct")
        if any(s < 0 or s >= 2**64 for s in v):
            raise ValueError("seeds must lie in [0, 2^64)")
        return v

    def labels(self) -> str:
        return self.label_key or DEFAULT_LABELS[self.scenario.kind]
