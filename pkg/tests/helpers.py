import numpy as np
from core.schema import VoteMatrix
from core.state import make_state
from sampler.schema import ChainDraws

def vote_matrix(cells, **kw) -> VoteMatrix:
    cells = np.asarray(cells)
    n, p = cells.shape
    return VoteMatrix(
        cells=cells,
        legislator_ids=[f"L{i}" for i in range(n)],
        bill_ids=[f"B{j}" for j in range(p)],
        **kw,
    )

def random_state(rng, n, p, k=2, gamma=1.3):
    return make_state(
        theta=rng.normal(size=n),
        beta=rng.normal(size=p),
        gamma=gamma,
        z=rng.normal(size=(n, k)),
        w=rng.normal(size=(p, k)),
        sigma_theta_sq=0.8,
    )

def random_votes(rng, n, p, missing=0.1) -> VoteMatrix:
    cells = (rng.random((n, p)) < 0.5).astype(np.int8)
    cells[rng.random((n, p)) < missing] = -1
    cells[0, 0] = 1  # never entirely Missing
    return vote_matrix(cells)

def chain_of(states) -> ChainDraws:
    return ChainDraws.from_states(list(states))
