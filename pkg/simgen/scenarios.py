"""Seeded synthetic roll calls with ground-truth labels.

Every bill has a supporter set that is a union of whole groups/factions:
supporters vote Yea with probability p, everyone else with probability q.
"""
from typing import Dict, List, Tuple
import numpy as np
from pydantic import BaseModel
from core.errors import ContractViolation
from core.schema import VoteMatrix
from utils.logs import get_logger
from utils.rng import generator_for
from .schema import (
    AgendaParams,
    ClusterParams,
    CohesionParams,
    CrossPartyParams,
    FourCoalitionParams,
    NoiseParams,
    ScenarioSpec,
)

logger = get_logger(__name__)

def _ids(prefix: str, n: int) -> List[str]:
    width = len(str(n))
    return [f"{prefix}{i + 1:0{width}d}" for i in range(n)]

def _draw(prob: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    return (rng.random(prob.shape) < prob).astype(np.int8)

def _provenance(kind: str, params: BaseModel, seed: int) -> Dict:
    return {"scenario": {"kind": kind, "params": params.model_dump(), "seed": int(seed)}}

def gen_cohesion_gradient(
    independent_share: float,
    p_indep: float,
    seed: int,
    loyalty: float = 0.95,
    **overrides,
) -> VoteMatrix:
    """Two blocs of five groups (10 legislators each) voting on 52 bloc contests."""
    params = CohesionParams(independent_share=independent_share, p_indep=p_indep, loyalty=loyalty, **overrides)
    n_indep = params.independent_share * params.group_size
    if abs(n_indep - round(n_indep)) > 1e-9:
        raise ContractViolation(
            f"independent_share {params.independent_share} does not give a whole number of "
            f"independents in groups of {params.group_size}"
        )
    n_indep = int(round(n_indep))
    rng = generator_for(seed, "simulate")
    n = params.n_groups * params.group_size
    half = params.n_groups // 2

    group = np.repeat(np.arange(params.n_groups), params.group_size)
    bloc = np.where(group < half, 0, 1)
    independent = np.zeros(n, dtype=bool)
    for g in range(params.n_groups):
        members = np.flatnonzero(group == g)
        independent[rng.permutation(members)[:n_indep]] = True

    # bills alternate between favoring bloc A and bloc B
    favored = np.arange(params.n_bills) % 2
    prob = np.where(bloc[:, None] == favored[None, :], params.loyalty, 1.0 - params.loyalty)
    prob[independent, :] = params.p_indep
    cells = _draw(prob, rng)

    return VoteMatrix(
        cells=cells,
        legislator_ids=_ids("leg", n),
        bill_ids=_ids("bill", params.n_bills),
        labels={
            "group": [f"G{g + 1}" for g in group],
            "bloc": ["A" if b == 0 else "B" for b in bloc],
            "independent": ["yes" if x else "no" for x in independent],
        },
        bill_meta={
            "bill_type": ["bloc_contest"] * params.n_bills,
            "target": ["A" if f == 0 else "B" for f in favored],
        },
        provenance=_provenance("cohesion_gradient", params, seed),
    )

def gen_cluster_recovery(
    k: int,
    p: float,
    q: float,
    seed: int,
    bills_per_cluster: int = 100,
    **overrides,
) -> VoteMatrix:
    """k disjoint clusters of 20 legislators, each supporting its own bills."""
    params = ClusterParams(k=k, p=p, q=q, bills_per_cluster=bills_per_cluster, **overrides)
    if not params.p > params.q:
        raise ContractViolation(f"signal must be positive: p={params.p} <= q={params.q}")
    rng = generator_for(seed, "simulate")
    cluster = np.repeat(np.arange(params.k), params.cluster_size)
    target = np.repeat(np.arange(params.k), params.bills_per_cluster)
    prob = np.where(cluster[:, None] == target[None, :], params.p, params.q)
    cells = _draw(prob, rng)
    return VoteMatrix(
        cells=cells,
        legislator_ids=_ids("leg", cluster.size),
        bill_ids=_ids("bill", target.size),
        labels={"cluster": [f"C{c + 1}" for c in cluster]},
        bill_meta={
            "bill_type": ["cluster"] * target.size,
            "target": [f"C{t + 1}" for t in target],
        },
        provenance=_provenance("cluster_recovery", params, seed),
    )

def _factions(sizes: List[Tuple[str, str, int]]):
    """sizes: (faction, party, size) -> per-legislator faction and party arrays."""
    faction = np.concatenate([[f] * s for f, _, s in sizes])
    party = np.concatenate([[pt] * s for _, pt, s in sizes])
    return faction, party

def _bill_plan(partisan: int, faction_names: List[str], n_faction: int, bridges: List[Tuple[str, List[str], int]]):
    """(bill_type, supporter factions) per bill; partisan bills alternate L / C,
    faction bills cycle through the factions in order."""
    plan = []
    for j in range(partisan):
        party = "L" if j % 2 == 0 else "C"
        plan.append(("partisan", [f for f in faction_names if f.startswith(party)]))
    for j in range(n_faction):
        plan.append(("faction", [faction_names[j % len(faction_names)]]))
    for bill_type, supporters, count in bridges:
        plan.extend((bill_type, list(supporters)) for _ in range(count))
    return plan

def _party_matrix(faction, party, plan, p, q, rng, kind, params, seed) -> VoteMatrix:
    supporters = np.array([np.isin(faction, targets) for _, targets in plan]).T
    cells = _draw(np.where(supporters, p, q), rng)
    return VoteMatrix(
        cells=cells,
        legislator_ids=_ids("leg", faction.size),
        bill_ids=_ids("bill", len(plan)),
        labels={"party": party.tolist(), "faction": faction.tolist()},
        bill_meta={
            "bill_type": [t for t, _ in plan],
            "target": ["+".join(targets) for _, targets in plan],
        },
        provenance=_provenance(kind, params, seed),
    )

def gen_party_faction(scenario: str, params, seed: int) -> VoteMatrix:
    """Party/faction scenarios: agenda_sweep, noise_sweep, cross_party, four_coalition_demo."""
    scenario = scenario.strip().lower().replace("-", "_")
    if isinstance(params, BaseModel):
        params = params.model_dump()
    params = dict(params or {})
    rng = generator_for(seed, "simulate")

    if scenario == "agenda_sweep":
        prm = AgendaParams(**params)
        names = ["L1", "L2", "L3", "C1", "C2", "C3"]
        faction, party = _factions([(f, f[0], prm.faction_size) for f in names])
        partisan = int(round(prm.partisan_share * prm.n_bills))
        plan = _bill_plan(partisan, names, prm.n_bills - partisan, [])
        return _party_matrix(faction, party, plan, prm.p, prm.q, rng, scenario, prm, seed)

    if scenario == "noise_sweep":
        prm = NoiseParams(**params)
        names = ["L1", "L2", "C1", "C2"]
        faction, party = _factions([(f, f[0], prm.faction_size) for f in names])
        partisan = int(round(prm.partisan_share * prm.n_bills))
        plan = _bill_plan(partisan, names, prm.n_bills - partisan, [])
        return _party_matrix(faction, party, plan, prm.p, prm.q, rng, scenario, prm, seed)

    if scenario in ("cross_party", "crossparty", "cross_party_coalition"):
        prm = CrossPartyParams(**params)
        names = ["L1", "L2", "C1", "C2"]
        faction, party = _factions([
            ("L1", "L", prm.majority_size),
            ("L2", "L", prm.minority_size),
            ("C1", "C", prm.majority_size),
            ("C2", "C", prm.minority_size),
        ])
        n_a = prm.n_bridge if prm.coalition in ("both", "majority_consensus") else 0
        n_b = prm.n_bridge if prm.coalition in ("both", "ends_against_middle") else 0
        partisan = prm.n_bills - n_a - n_b
        if partisan < 0:
            raise ContractViolation(f"{n_a + n_b} bridge bills do not fit in {prm.n_bills} bills")
        plan = _bill_plan(partisan, names, 0, [("bridge_a", ["L1", "C1"], n_a), ("bridge_b", ["L2", "C2"], n_b)])
        return _party_matrix(faction, party, plan, prm.p, prm.q, rng, "cross_party", prm, seed)

    if scenario == "four_coalition_demo":
        prm = FourCoalitionParams(**params)
        names = ["L1", "L2", "C1", "C2"]
        faction, party = _factions([
            ("L1", "L", prm.majority_size),
            ("L2", "L", prm.minority_size),
            ("C1", "C", prm.majority_size),
            ("C2", "C", prm.minority_size),
        ])
        plan = _bill_plan(prm.n_partisan, names, prm.faction_bills_per_faction * len(names), [])
        return _party_matrix(faction, party, plan, prm.p, prm.q, rng, scenario, prm, seed)

    raise ContractViolation(f"unknown party/faction scenario '{scenario}'")

def generate(spec: ScenarioSpec) -> VoteMatrix:
    params = spec.parsed_params()
    if spec.kind == "cohesion_gradient":
        extra = params.model_dump(exclude={"independent_share", "p_indep", "loyalty"})
        data = gen_cohesion_gradient(params.independent_share, params.p_indep, spec.seed, loyalty=params.loyalty, **extra)
    elif spec.kind == "cluster_recovery":
        extra = params.model_dump(exclude={"k", "p", "q", "bills_per_cluster"})
        data = gen_cluster_recovery(params.k, params.p, params.q, spec.seed, bills_per_cluster=params.bills_per_cluster, **extra)
    else:
        data = gen_party_faction(spec.kind, params, spec.seed)
    logger.info("generated %s: %dx%d (seed %d)", spec.kind, data.n_legislators, data.n_bills, spec.seed)
    return data
