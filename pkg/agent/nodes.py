from typing import Dict
from birt.model import fit_birt
from identify.align import summarize
from metrics.scores import build_report
from sampler.gibbs import run_chain
from simgen.scenarios import generate
from utils.logs import get_logger
from .schema import ReplicationJob

logger = get_logger(__name__)

def _job(state: Dict) -> ReplicationJob:
    return ReplicationJob.model_validate(state["job"])

def _row(state: Dict, method: str, report) -> Dict:
    job = _job(state)
    row = {
        "scenario": job.scenario.kind,
        "seed": state["seed"],
        "method": method,
        "label_key": report.label_key,
        "silhouette_mean": report.silhouette_mean,
        "accuracy": report.accuracy,
        "apre": report.apre,
        "gamma_mean": report.gamma_mean,
    }
    for k, sd in enumerate(report.dimension_sd, start=1):
        row[f"dim_{k}_sd"] = sd
    return row

# Nodes
def simulate_node(state: Dict) -> Dict:
    job = _job(state)
    spec = job.scenario.model_copy(update={"seed": state["seed"]})
    return {"data": generate(spec), "last_op": "simulate"}

def fit_lsirm_node(state: Dict) -> Dict:
    job = _job(state)
    config = job.sampler.model_copy(update={"seed": state["seed"]})
    chain = run_chain(state["data"], job.hyper, config)
    return {"chain": chain, "aligned": summarize(chain), "last_op": "fit_lsirm"}

def fit_birt_node(state: Dict) -> Dict:
    job = _job(state)
    config = job.sampler.model_copy(update={"seed": state["seed"]})
    fit = fit_birt(state["data"], config, prior_sd=job.birt_prior_sd, dims=job.hyper.k)
    return {"birt": fit, "last_op": "fit_birt"}

def score_node(state: Dict) -> Dict:
    job = _job(state)
    data, label_key = state["data"], job.labels()
    rows = []
    lsirm = build_report(
        state["aligned"], data, label_key=label_key, chains=[state["chain"]],
        audit_triples=job.audit_triples, seed=state["seed"], method="lsirm",
    )
    rows.append(_row(state, "lsirm", lsirm))
    if state.get("birt") is not None:
        birt = build_report(
            state["birt"], data, label_key=label_key,
            audit_triples=job.audit_triples, seed=state["seed"], method="birt",
        )
        rows.append(_row(state, "birt", birt))
    logger.info(
        "seed %d scored: %s", state["seed"],
        ", ".join(f"{r['method']} silhouette={r['silhouette_mean']:.3f}" for r in rows if r["silhouette_mean"] is not None),
    )
    return {"rows": rows, "last_op": "score"}
