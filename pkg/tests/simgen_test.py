from collections import Counter
import numpy as np
import pytest
from pydantic import ValidationError
from core.errors import ContractViolation
from simgen.scenarios import gen_cluster_recovery, gen_cohesion_gradient, gen_party_faction, generate
from simgen.schema import ScenarioSpec

def test_cohesion_gradient_layout():
    data = gen_cohesion_gradient(0.3, 0.5, seed=1)
    assert data.cells.shape == (100, 52)
    groups = np.array(data.labels["group"])
    independent = np.array(data.labels["independent"]) == "yes"
    for g in np.unique(groups):
        assert independent[groups == g].sum() == 3
    assert Counter(data.labels["bloc"]) == {"A": 50, "B": 50}
    assert data.provenance["scenario"]["kind"] == "cohesion_gradient"

def test_cohesion_gradient_loyalty():
    data = gen_cohesion_gradient(0.1, 0.5, seed=2)
    bloc = np.array(data.labels["bloc"])
    loyal = np.array(data.labels["independent"]) == "no"
    favored = np.array(data.bill_meta["target"])
    supports = bloc[:, None] == favored[None, :]
    cells = data.cells
    assert cells[loyal[:, None] & supports].mean() == pytest.approx(0.95, abs=0.02)
    assert cells[loyal[:, None] & ~supports].mean() == pytest.approx(0.05, abs=0.02)
    assert cells[~loyal].mean() == pytest.approx(0.5, abs=0.07)

def test_cohesion_gradient_needs_whole_independents():
    with pytest.raises(ContractViolation):
        gen_cohesion_gradient(0.25, 0.5, seed=0)
    with pytest.raises(ValidationError):
        gen_cohesion_gradient(0.1, 0.5, seed=0, n_groups=9)

def test_cluster_recovery_layout():
    data = gen_cluster_recovery(5, 0.8, 0.2, seed=3)
    assert data.cells.shape == (100, 500)
    cluster = np.array(data.labels["cluster"])
    target = np.array(data.bill_meta["target"])
    inside = cluster[:, None] == target[None, :]
    assert data.cells[inside].mean() == pytest.approx(0.8, abs=0.02)
    assert data.cells[~inside].mean() == pytest.approx(0.2, abs=0.01)

def test_cluster_recovery_needs_signal():
    with pytest.raises(ContractViolation):
        gen_cluster_recovery(3, 0.4, 0.4, seed=0)

def test_agenda_sweep_bill_plan():
    data = gen_party_faction("agenda_sweep", {"partisan_share": 0.25}, seed=4)
    assert data.cells.shape == (180, 400)
    types = Counter(data.bill_meta["bill_type"])
    assert types == {"partisan": 100, "faction": 300}
    targets = Counter(t for t, b in zip(data.bill_meta["target"], data.bill_meta["bill_type"]) if b == "faction")
    assert set(targets.values()) == {50}
    assert Counter(data.labels["party"]) == {"L": 90, "C": 90}

def test_noise_sweep_q():
    data = gen_party_faction("noise_sweep", {"q": 0.3}, seed=5)
    assert data.cells.shape == (80, 200)
    assert data.provenance["scenario"]["params"]["q"] == 0.3

@pytest.mark.parametrize("coalition, n_a, n_b", [("both", 40, 40), ("majority_consensus", 40, 0), ("ends_against_middle", 0, 40)])
def test_cross_party_coalitions(coalition, n_a, n_b):
    data = gen_party_faction("cross-party", {"coalition": coalition}, seed=6)
    assert data.cells.shape == (160, 240)
    types = Counter(data.bill_meta["bill_type"])
    assert types.get("bridge_a", 0) == n_a
    assert types.get("bridge_b", 0) == n_b
    assert types["partisan"] == 240 - n_a - n_b
    faction = np.array(data.labels["faction"])
    bridge = np.array(data.bill_meta["bill_type"]) == "bridge_a"
    if n_a:
        assert data.cells[np.ix_(np.isin(faction, ["L1", "C1"]), bridge)].mean() > 0.9
        assert data.cells[np.ix_(np.isin(faction, ["L2", "C2"]), bridge)].mean() < 0.2

def test_four_coalition_demo():
    data = gen_party_faction("four_coalition_demo", {}, seed=7)
    assert data.cells.shape == (160, 400)
    assert Counter(data.labels["faction"]) == {"L1": 70, "L2": 10, "C1": 70, "C2": 10}

def test_unknown_scenario():
    with pytest.raises(ContractViolation):
        gen_party_faction("three_party", {}, seed=0)

def test_generation_is_seeded():
    spec = ScenarioSpec(kind="cluster-recovery", params={"k": 3}, seed=11)
    a, b = generate(spec), generate(spec)
    assert np.array_equal(a.cells, b.cells)
    c = generate(spec.model_copy(update={"seed": 12}))
    assert not np.array_equal(a.cells, c.cells)
    assert a.provenance["scenario"]["kind"] == "cluster_recovery"
    assert a.provenance["scenario"]["seed"] == 11
    assert a.provenance["scenario"]["params"]["k"] == 3

def test_spec_validation():
    with pytest.raises(ValidationError):
        ScenarioSpec(kind="nonsense")
    with pytest.raises(ValidationError):
        generate(ScenarioSpec(kind="cluster_recovery", params={"p": 1.5}))
