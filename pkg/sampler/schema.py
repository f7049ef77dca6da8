from typing import Dict, Iterator, List, Literal, Tuple
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from core.state import ModelState

Block = Literal["impute", "theta", "beta", "log_gamma", "z", "w", "sigma_theta_sq"]

# Robbins-Monro targets: scalar random walks vs vector random walks
TARGET_ACCEPTANCE: Dict[str, float] = {
    "theta": 0.44,
    "beta": 0.44,
    "log_gamma": 0.44,
    "z": 0.234,
    "w": 0.234,
}

class SamplerConfig(BaseModel):
    n_iterations: int = Field(30000, ge=1)
    burn_in: int = Field(5000, ge=0)
    thin: int = Field(5, ge=1)
    step_theta: float = Field(0.5, ge=0)
    step_beta: float = Field(0.5, ge=0)
    step_loggamma: float = Field(0.05, ge=0)
    step_z: float = Field(0.3, ge=0)
    step_w: float = Field(0.3, ge=0)
    seed: int = Field(0, ge=0, lt=2**64)
    adapt_during_burnin: bool = True
    n_chains: int = Field(1, ge=1)
    init: Literal["random", "pca"] = "random"
    fixed_blocks: Tuple[Block, ...] = ()

    @model_validator(mode="after")
    def _check_lengths(self):
        if self.burn_in >= self.n_iterations:
            raise ValueError(f"burn_in ({self.burn_in}) must be smaller than n_iterations ({self.n_iterations})")
        return self

    def steps(self) -> Dict[str, float]:
        return {
            "theta": self.step_theta,
            "beta": self.step_beta,
            "log_gamma": self.step_loggamma,
            "z": self.step_z,
            "w": self.step_w,
        }

    def n_draws(self) -> int:
        return (self.n_iterations - self.burn_in) // self.thin

class ChainDraws(BaseModel):
    """Thinned post-burn-in draws stored as stacked arrays (draw axis first)."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    theta: np.ndarray           # (D, N)
    beta: np.ndarray            # (D, P)
    gamma: np.ndarray           # (D,)
    z: np.ndarray               # (D, N, K)
    w: np.ndarray               # (D, P, K)
    sigma_theta_sq: np.ndarray  # (D,)
    acceptance_rates: Dict[str, float] = Field(default_factory=dict)
    final_steps: Dict[str, float] = Field(default_factory=dict)
    seed: int = 0
    chain: int = 0
    config_echo: SamplerConfig = Field(default_factory=SamplerConfig)
    elapsed_seconds: float = 0.0

    @model_validator(mode="after")
    def _check(self):
        d = self.gamma.shape[0]
        for name in ("theta", "beta", "z", "w", "sigma_theta_sq"):
            if getattr(self, name).shape[0] != d:
                raise ValueError(f"{name} holds {getattr(self, name).shape[0]} draws, gamma holds {d}")
        for block, rate in self.acceptance_rates.items():
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"acceptance rate of {block} outside [0, 1]: {rate}")
        return self

    def __len__(self) -> int:
        return int(self.gamma.shape[0])

    @property
    def dims(self) -> Tuple[int, int, int]:
        return int(self.z.shape[1]), int(self.w.shape[1]), int(self.z.shape[2])

    def draw(self, d: int) -> ModelState:
        return ModelState(
            theta=self.theta[d].copy(),
            beta=self.beta[d].copy(),
            gamma=float(self.gamma[d]),
            z=self.z[d].copy(),
            w=self.w[d].copy(),
            sigma_theta_sq=float(self.sigma_theta_sq[d]),
        )

    def states(self) -> Iterator[ModelState]:
        for d in range(len(self)):
            yield self.draw(d)

    @classmethod
    def from_states(cls, states: List[ModelState], **kwargs) -> "ChainDraws":
        if not states:
            raise ValueError("no states to stack")
        return cls(
            theta=np.stack([s["theta"] for s in states]),
            beta=np.stack([s["beta"] for s in states]),
            gamma=np.array([s["gamma"] for s in states], dtype=float),
            z=np.stack([s["z"] for s in states]),
            w=np.stack([s["w"] for s in states]),
            sigma_theta_sq=np.array([s["sigma_theta_sq"] for s in states], dtype=float),
            **kwargs,
        )
