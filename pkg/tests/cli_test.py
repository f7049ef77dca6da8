import json
import pandas as pd
import pytest
from ui.cli import main

SCENARIO = ["--kind", "cluster-recovery", "--k", "2", "--param", "bills_per_cluster=8", "--param", "cluster_size=6", "--seed", "3"]
SHORT = ["--iterations", "40", "--burn-in", "10", "--thin", "3"]

def test_simulate_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["simulate", *SCENARIO, "--out", str(a)]) == 0
    assert main(["simulate", *SCENARIO, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.with_suffix(".json").read_bytes() == b.with_suffix(".json").read_bytes()
    assert a.read_text().splitlines()[0].startswith("legislator_id,bill01,bill02")

def test_unknown_flag_is_a_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--kind", "cluster-recovery", "--colour", "red", "--out", "x.csv"])
    assert exc.value.code == 1

def test_missing_input_is_a_data_error(tmp_path, capsys):
    assert main(["fit", "--data", str(tmp_path / "absent.csv"), "--out", str(tmp_path / "c.csv")]) == 2
    assert "data error" in capsys.readouterr().err

def test_bad_config_is_a_usage_error(tmp_path):
    data = tmp_path / "m.csv"
    main(["simulate", *SCENARIO, "--out", str(data)])
    assert main(["fit", "--data", str(data), "--iterations", "10", "--burn-in", "20", "--out", str(tmp_path / "c.csv")]) == 1
    assert main(["simulate", "--kind", "three-party", "--out", str(data)]) == 1
    assert main(["fit", "--data", str(data), "--sampler", str(tmp_path / "none.json"), "--out", str(tmp_path / "c.csv")]) == 1

def test_end_to_end(tmp_path):
    data, chain, birt = tmp_path / "m.csv", tmp_path / "chain.csv", tmp_path / "birt.csv"
    assert main(["simulate", *SCENARIO, "--out", str(data)]) == 0
    assert main(["fit", "--data", str(data), *SHORT, "--chains", "2", "--dims", "2", "--seed", "1", "--out", str(chain)]) == 0
    second = tmp_path / "chain_chain1.csv"
    assert chain.exists() and second.exists()
    assert json.loads(second.with_suffix(".json").read_text())["chain"] == 1
    assert main(["fit-birt", "--data", str(data), *SHORT, "--seed", "1", "--out", str(birt)]) == 0

    aligned = tmp_path / "aligned.csv"
    assert main(["align", "--chain", str(chain), "--data", str(data), "--out", str(aligned)]) == 0
    table = pd.read_csv(aligned)
    assert list(table.columns) == ["node_id", "node_type", "dim_1", "dim_2", "sd_1", "sd_2"]
    assert (table["node_type"] == "legislator").sum() == 12
    assert main(["align", "--chain", str(birt), "--out", str(tmp_path / "birt_aligned.csv")]) == 0

    report = tmp_path / "report.json"
    args = ["metrics", "--chain", str(chain), str(second), "--data", str(data), "--labels", "cluster", "--n-triples", "200", "--out", str(report)]
    assert main(args) == 0
    summary = json.loads(report.read_text())
    assert 0.0 <= summary["accuracy"] <= 1.0
    assert summary["estimator"] == "plugin"
    assert summary["audit_violations"]["euclidean"] == 0
    assert len(pd.read_csv(report.with_suffix(".silhouette.csv"))) == 12
    anchors = pd.read_csv(report.with_suffix(".anchors.csv"))
    assert len(anchors) == 2 * 2 * 5
    assert {"dim", "end", "rank", "bill_id", "coordinate", "bill_type", "target"} <= set(anchors.columns)
    assert main(["metrics", "--chain", str(birt), "--data", str(data), "--estimator", "draw_average", "--out", str(tmp_path / "b.json")]) == 0

    audit = tmp_path / "audit.json"
    assert main(["audit-metric", "--n-triples", "1000", "--out", str(audit)]) == 0
    assert [r["form"] for r in json.loads(audit.read_text())] == ["euclidean", "quadratic", "gaussian_utility"]

    svg = tmp_path / "plot.svg"
    assert main(["plot-data", "--aligned", str(aligned), "--data", str(data), "--labels", "cluster", "--out", str(svg)]) == 0
    assert svg.read_text().startswith("<svg")
    assert set(pd.read_csv(svg.with_suffix(".csv"))["group"]) == {"C1", "C2", "bill"}

def test_fit_with_holdout(tmp_path):
    data, chain = tmp_path / "m.csv", tmp_path / "chain.csv"
    main(["simulate", *SCENARIO, "--out", str(data)])
    assert main(["fit", "--data", str(data), *SHORT, "--holdout-frac", "0.1", "--out", str(chain)]) == 0
    holdout = tmp_path / "chain.holdout.csv"
    assert list(pd.read_csv(holdout).columns) == ["legislator_id", "bill_id", "vote"]
    report = tmp_path / "r.json"
    assert main(["metrics", "--chain", str(chain), "--data", str(data), "--holdout", str(holdout), "--out", str(report)]) == 0
    assert json.loads(report.read_text())["n_cells"] == len(pd.read_csv(holdout))

def test_fit_is_independent_of_worker_count(tmp_path):
    data = tmp_path / "m.csv"
    main(["simulate", *SCENARIO, "--out", str(data)])
    outs = []
    for workers in ("1", "2"):
        out = tmp_path / f"w{workers}.csv"
        assert main(["fit", "--data", str(data), *SHORT, "--chains", "2", "--workers", workers, "--out", str(out)]) == 0
        outs.append(out)
    main(["fit", "--data", str(data), *SHORT, "--workers", "1", "--out", str(tmp_path / "reset.csv")])
    assert outs[0].read_bytes() == outs[1].read_bytes()
    assert (tmp_path / "w1_chain1.csv").read_bytes() == (tmp_path / "w2_chain1.csv").read_bytes()
