from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List
import pandas as pd
from langgraph.graph import StateGraph, END
from utils.config import get_workers
from utils.logs import get_logger
from .nodes import simulate_node, fit_lsirm_node, fit_birt_node, score_node
from .schema import ReplicationJob
from .state import ReplicationState, initial_state

logger = get_logger(__name__)

def build_graph():
    g = StateGraph(ReplicationState)

    g.add_node("simulate", simulate_node)
    g.add_node("fit_lsirm", fit_lsirm_node)
    g.add_node("fit_birt", fit_birt_node)
    g.add_node("score", score_node)

    g.set_entry_point("simulate")
    g.add_edge("simulate", "fit_lsirm")

    def route(state: ReplicationState):
        return "birt" if state["job"].get("include_birt") else "score"

    g.add_conditional_edges(
        "fit_lsirm",
        route,
        {"birt": "fit_birt", "score": "score"},
    )
    g.add_edge("fit_birt", "score")
    g.add_edge("score", END)

    return g.compile()

def run_replication(job: Dict, seed: int) -> List[Dict]:
    """One pass of the graph for one seed; returns its result rows."""
    final = build_graph().invoke(initial_state(job, seed))
    return final["rows"]

def _replication_job(args) -> List[Dict]:
    return run_replication(*args)

def replicate(job: ReplicationJob) -> pd.DataFrame:
    """Every seed of the job through the pipeline; rows sorted by (seed, method)."""
    payload = job.model_dump(mode="json")
    tasks = [(payload, seed) for seed in job.seeds]
    workers = min(get_workers(), len(tasks))
    logger.info("replicating %s over %d seeds with %d workers", job.scenario.kind, len(tasks), workers)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_replication_job, tasks))
    else:
        results = [_replication_job(t) for t in tasks]
    table = pd.DataFrame([row for rows in results for row in rows])
    return table.sort_values(["seed", "method"], kind="stable").reset_index(drop=True)
