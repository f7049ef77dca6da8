import logging
import numpy as np
import pytest
from pydantic import ValidationError
from core.errors import ContractViolation, DataError
from core.schema import MISSING
from utils.votes_io import (
    IngestConfig,
    filter_lopsided,
    holdout_mask,
    ingest_votes,
    mask_cells,
    minority_share,
    read_holdout,
    read_vote_matrix,
    write_holdout,
    write_vote_matrix,
)
from helpers import vote_matrix

VOTES = """congress,chamber,rollnumber,icpsr,cast_code,prob
117,House,2,10,1,99.0
117,House,2,9,6,98.0
117,House,10,10,4,97.0
117,House,10,9,9,50.0
117,House,1,9,2,88.0
117,House,1,10,3,70.0
"""

def write(tmp_path, text, name="votes.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path

def test_ingest_maps_codes_and_orders_ids(tmp_path):
    data = ingest_votes(write(tmp_path, VOTES))
    assert data.legislator_ids == ["9", "10"]
    assert data.bill_ids == ["1", "2", "10"]
    assert data.cells.tolist() == [[1, 0, MISSING], [1, 1, 0]]
    assert data.provenance["ingest"]["config"]["lopsided_threshold"] == 0.025

def test_ingest_unknown_codes_are_missing(tmp_path, caplog):
    text = VOTES + "117,House,1,11,42,1.0\n117,House,2,11,1,1.0\n"
    logging.getLogger("lsirm").addHandler(caplog.handler)
    try:
        data = ingest_votes(write(tmp_path, text))
    finally:
        logging.getLogger("lsirm").removeHandler(caplog.handler)
    assert data.legislator_ids == ["9", "10", "11"]
    assert data.cells[2].tolist() == [MISSING, 1, MISSING]
    assert "unknown cast codes" in caplog.text

def test_ingest_rejects_duplicates(tmp_path):
    with pytest.raises(DataError, match="duplicate"):
        ingest_votes(write(tmp_path, VOTES + "117,House,1,9,1,1.0\n"))

def test_ingest_rejects_missing_columns(tmp_path):
    with pytest.raises(DataError, match="lacks columns"):
        ingest_votes(write(tmp_path, "icpsr,cast_code\n1,1\n"))

def test_ingest_rejects_empty_result(tmp_path):
    with pytest.raises(DataError, match="empty result"):
        ingest_votes(write(tmp_path, "rollnumber,icpsr,cast_code\n1,1,9\n1,2,0\n"))

def test_ingest_config_validation():
    with pytest.raises(ValidationError):
        IngestConfig(yea_codes={1, 9})
    with pytest.raises(ValidationError):
        IngestConfig(lopsided_threshold=0.5)

def test_filter_lopsided():
    # bill 0: 99 Yea / 1 Nay; bill 1: unanimous; bill 2: 60 / 40
    cells = np.ones((100, 3), dtype=int)
    cells[0, 0] = 0
    cells[:40, 2] = 0
    data = vote_matrix(cells)
    np.testing.assert_allclose(minority_share(data), [0.01, 0.0, 0.4])
    kept = filter_lopsided(data, 0.025)
    assert kept.bill_ids == ["B2"]
    assert filter_lopsided(kept, 0.025).bill_ids == kept.bill_ids
    assert filter_lopsided(data, 0.0).bill_ids == data.bill_ids
    with pytest.raises(DataError):
        filter_lopsided(data, 0.45)
    with pytest.raises(ContractViolation):
        filter_lopsided(data, 0.5)

def test_ingest_drops_legislators_without_votes(tmp_path, caplog):
    text = "rollnumber,icpsr,cast_code\n1,1,1\n2,1,6\n1,2,9\n2,2,9\n1,3,4\n2,3,1\n"
    logging.getLogger("lsirm").addHandler(caplog.handler)
    try:
        data = ingest_votes(write(tmp_path, text), IngestConfig(drop_empty=False))
    finally:
        logging.getLogger("lsirm").removeHandler(caplog.handler)
    assert data.legislator_ids == ["1", "3"]
    assert data.observed_mask().any(axis=1).all()
    assert "dropped 1 legislators and 0 bills" in caplog.text

def test_filter_lopsided_keeps_every_row_observed():
    data = vote_matrix([[1, 1, 0], [1, -1, -1], [1, 0, 1], [1, 1, 0]])
    kept = filter_lopsided(data, 0.025)
    assert kept.bill_ids == ["B1", "B2"]
    assert kept.legislator_ids == ["L0", "L2", "L3"]
    observed = kept.observed_mask()
    assert observed.any(axis=1).all() and observed.any(axis=0).all()

def test_filter_lopsided_drops_unobserved_bills():
    data = vote_matrix([[1, -1, 0], [0, -1, 1]])
    kept = filter_lopsided(data, 0.0)
    assert kept.bill_ids == ["B0", "B2"]

def test_matrix_file_round_trip(tmp_path):
    data = vote_matrix(
        [[1, 0, -1], [0, 1, 1]],
        labels={"party": ["D", "R"]},
        bill_meta={"bill_type": ["x", "y", "z"]},
        provenance={"scenario": {"kind": "cluster_recovery", "seed": 4}},
    )
    path = write_vote_matrix(data, tmp_path / "m.csv")
    assert path.read_text().splitlines()[:2] == ["legislator_id,B0,B1,B2", "L0,1,0,NA"]
    back = read_vote_matrix(path)
    assert np.array_equal(back.cells, data.cells)
    assert back.legislator_ids == data.legislator_ids
    assert back.labels == data.labels
    assert back.bill_meta == data.bill_meta
    assert back.provenance == data.provenance

def test_matrix_file_errors(tmp_path):
    with pytest.raises(DataError):
        read_vote_matrix(tmp_path / "absent.csv")
    with pytest.raises(DataError):
        read_vote_matrix(write(tmp_path, "legislator_id,B0\nL0,7\n"))
    with pytest.raises(DataError):
        read_vote_matrix(write(tmp_path, "name,B0\nL0,1\n"))

def test_holdout_split(tmp_path, rng):
    cells = (rng.random((10, 8)) < 0.5).astype(int)
    cells[0, :3] = -1
    data = vote_matrix(cells)
    mask = holdout_mask(data, 0.2, seed=5)
    assert mask.sum() == round(0.2 * data.n_observed())
    assert not mask[0, :3].any()
    assert np.array_equal(mask, holdout_mask(data, 0.2, seed=5))
    training = mask_cells(data, mask)
    assert np.all(training.cells[mask] == MISSING)
    path = write_holdout(data, mask, tmp_path / "holdout.csv")
    restored_mask, restored = read_holdout(path, training)
    assert np.array_equal(restored_mask, mask)
    assert np.array_equal(restored.cells, data.cells)

def test_holdout_fraction_bounds(rng):
    data = vote_matrix([[1, 0], [0, 1]])
    with pytest.raises(ContractViolation):
        holdout_mask(data, 1.0, seed=0)
    with pytest.raises(DataError):
        holdout_mask(data, 0.01, seed=0)
