from typing import Any, Dict, Literal
from pydantic import BaseModel, Field, field_validator

ScenarioKind = Literal[
    "cohesion_gradient",
    "cluster_recovery",
    "agenda_sweep",
    "noise_sweep",
    "cross_party",
    "four_coalition_demo",
]

class CohesionParams(BaseModel):
    """Two blocs of n_groups/2 groups; independents vote Yea w.p. p_indep."""
    independent_share: float = Field(0.1, ge=0.0, le=1.0)
    p_indep: float = Field(0.5, ge=0.0, le=1.0)
    loyalty: float = Field(0.95, ge=0.0, le=1.0)
    n_groups: int = Field(10, ge=2)
    group_size: int = Field(10, ge=1)
    n_bills: int = Field(52, ge=1)

    @field_validator("n_groups")
    @classmethod
    def _even(cls, v):
        if v % 2:
            raise ValueError("groups are split evenly between two blocs; n_groups must be even")
        return v

class ClusterParams(BaseModel):
    k: int = Field(5, ge=2)
    p: float = Field(0.8, ge=0.0, le=1.0)
    q: float = Field(0.2, ge=0.0, le=1.0)
    bills_per_cluster: int = Field(100, ge=1)
    cluster_size: int = Field(20, ge=1)

class AgendaParams(BaseModel):
    """Two parties x three factions; partisan bills vs faction bills."""
    partisan_share: float = Field(0.5, ge=0.0, le=1.0)
    n_bills: int = Field(400, ge=1)
    faction_size: int = Field(30, ge=1)
    p: float = Field(0.95, ge=0.0, le=1.0)
    q: float = Field(0.10, ge=0.0, le=1.0)

class NoiseParams(BaseModel):
    """Two parties x two factions; fixed agenda, varying q."""
    q: float = Field(0.10, ge=0.0, le=1.0)
    p: float = Field(0.95, ge=0.0, le=1.0)
    partisan_share: float = Field(0.5, ge=0.0, le=1.0)
    n_bills: int = Field(200, ge=1)
    faction_size: int = Field(20, ge=1)

class CrossPartyParams(BaseModel):
    """Unequal factions (majority/minority per party) plus bridge bills.
    coalition: both -> Bridge-A and Bridge-B; majority_consensus -> Bridge-A only;
    ends_against_middle -> Bridge-B only. Remaining bills are partisan."""
    coalition: Literal["both", "majority_consensus", "ends_against_middle"] = "both"
    n_bills: int = Field(240, ge=1)
    n_bridge: int = Field(40, ge=0)
    majority_size: int = Field(70, ge=1)
    minority_size: int = Field(10, ge=1)
    p: float = Field(0.95, ge=0.0, le=1.0)
    q: float = Field(0.10, ge=0.0, le=1.0)

class FourCoalitionParams(BaseModel):
    n_partisan: int = Field(200, ge=0)
    faction_bills_per_faction: int = Field(50, ge=0)
    majority_size: int = Field(70, ge=1)
    minority_size: int = Field(10, ge=1)
    p: float = Field(0.95, ge=0.0, le=1.0)
    q: float = Field(0.10, ge=0.0, le=1.0)

PARAMS_BY_KIND = {
    "cohesion_gradient": CohesionParams,
    "cluster_recovery": ClusterParams,
    "agenda_sweep": AgendaParams,
    "noise_sweep": NoiseParams,
    "cross_party": CrossPartyParams,
    "four_coalition_demo": FourCoalitionParams,
}

class ScenarioSpec(BaseModel):
    kind: ScenarioKind
    params: Dict[str, Any] = Field(default_factory=dict)
    seed: int = Field(0, ge=0, lt=2**64)

    @field_validator("kind", mode="before")
    @classmethod
    def _normalize_kind(cls, v):
        return v.strip().lower().replace("-", "_") if isinstance(v, str) else v

    def parsed_params(self) -> BaseModel:
        return PARAMS_BY_KIND[self.kind].model_validate(self.params)
