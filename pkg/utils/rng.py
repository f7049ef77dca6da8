"""Counter-based random streams.

Every draw in a run is addressed by (seed, chain, iteration, block): the Philox
key holds (seed, chain) and the counter holds (block, iteration) in its high
words, so a stream can be recreated anywhere without replaying the run.
Index i inside a block always reads slot i of the block's vectorized draws.
"""
import zlib
import numpy as np

_MASK64 = (1 << 64) - 1

# Fixed block ids: the sampler, the generators and the BIRT baseline share the scheme
BLOCKS = {
    "init": 0,
    "impute": 1,
    "theta": 2,
    "beta": 3,
    "log_gamma": 4,
    "z": 5,
    "w": 6,
    "sigma_theta_sq": 7,
    "birt_x": 8,
    "birt_discrimination": 9,
    "birt_difficulty": 10,
    "simulate": 11,
    "holdout": 12,
    "audit": 13,
}

def block_id(block: str | int) -> int:
    if isinstance(block, int):
        return block
    if block in BLOCKS:
        return BLOCKS[block]
    # stable id for ad-hoc names (tests, scripts)
    return 1000 + zlib.crc32(block.encode("utf-8"))

class CounterStream:
    """Splittable stream keyed by (seed, chain)."""

    def __init__(self, seed: int, chain: int = 0):
        self.seed = int(seed) & _MASK64
        self.chain = int(chain) & _MASK64

    def generator(self, iteration: int, block: str | int) -> np.random.Generator:
        key = np.array([self.seed, self.chain], dtype=np.uint64)
        counter = np.array([0, 0, block_id(block) & _MASK64, int(iteration) & _MASK64], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key, counter=counter))

    def split(self, chain: int) -> "CounterStream":
        return CounterStream(self.seed, chain)

def generator_for(seed: int, block: str | int = "simulate", iteration: int = 0, chain: int = 0) -> np.random.Generator:
    """Shortcut for one-off seeded work (scenario generation, audits, masks)."""
    return CounterStream(seed, chain).generator(iteration, block)
