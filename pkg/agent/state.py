from typing import Any, Dict, List, Optional, TypedDict

class ReplicationState(TypedDict):
    """State carried through one replication of the pipeline.
    - job: ReplicationJob as a dict
    - seed: seed of this replication (data and chains)
    - data: simulated VoteMatrix
    - chain: latent space ChainDraws
    - aligned: AlignedPosterior of the chain
    - birt: BirtFit, when the job asks for the comparator
    - rows: one result row per fitted method
    - last_op: most recent node (debug/transparency)
    """
    job: Dict[str, Any]
    seed: int
    data: Optional[Any]
    chain: Optional[Any]
    aligned: Optional[Any]
    birt: Optional[Any]
    rows: List[Dict[str, Any]]
    last_op: Optional[str]

def initial_state(job: Dict[str, Any], seed: int) -> ReplicationState:
    return ReplicationState(
        job=job,
        seed=seed,
        data=None,
        chain=None,
        aligned=None,
        birt=None,
        rows=[],
        last_op=None,
    )
