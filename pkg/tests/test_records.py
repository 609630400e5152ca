import json
import math

import numpy as np
import pytest

from strongconv.ensembles import SeedSpec, sample_tuple
from strongconv.records import (
    MetricTable,
    RunRecord,
    emit,
    load_mat_tuple,
    save_mat_tuple,
)


def test_metric_table_row_width_checked():
    t = MetricTable("t", ("a", "b"))
    t.append(1, 2.0)
    with pytest.raises(ValueError):
        t.append(1)


def test_metric_table_json_roundtrip_with_complex_and_nan():
    t = MetricTable("t", ("a", "b", "c"))
    t.append(1 + 2j, math.nan, True)
    back = MetricTable.from_jsonable(t.to_jsonable())
    assert back.rows[0][0] == 1 + 2j
    assert math.isnan(back.rows[0][1])
    assert back.rows[0][2] is True


def test_empty_table_writes_header_only_csv(tmp_path):
    t = MetricTable("empty", ("x", "y"))
    path = tmp_path / "empty.csv"
    t.write_csv(path)
    assert path.read_text().strip() == "x,y"


def test_csv_cells_unwrap_numpy_scalars(tmp_path):
    t = MetricTable("t", ("a", "b", "c"))
    t.append(np.float64(0.5), np.int64(3), np.bool_(True))
    path = tmp_path / "t.csv"
    t.write_csv(path)
    assert path.read_text().strip().splitlines()[1] == "0.5,3,1"
    back = MetricTable.from_jsonable(t.to_jsonable())
    assert back.rows[0] == (0.5, 3, True)


def test_csv_row_count_matches_table(tmp_path):
    t = MetricTable("t", ("k", "v"))
    for k in (2, 4, 8):
        for r in range(3):
            t.append(k, float(r))
    path = tmp_path / "t.csv"
    t.write_csv(path)
    lines = path.read_text().strip().splitlines()
    assert len(lines) == 1 + 9


def test_run_record_roundtrip(tmp_path):
    t = MetricTable("m", ("k", "value"))
    t.append(4, 0.125)
    rec = RunRecord("demo", {"k_list": [4]}, SeedSpec(11, (1, 2)), {"m": t},
                    wall_clock_s=0.5)
    path = tmp_path / "run.json"
    rec.save_json(path)
    back = RunRecord.load_json(path)
    assert back.scenario_id == rec.scenario_id
    assert back.params == rec.params
    assert back.seed == rec.seed
    assert back.tables["m"].rows == t.rows


def test_emit_both_formats(tmp_path):
    t = MetricTable("m", ("k", "value"))
    t.append(4, 0.125)
    rec = RunRecord("demo", {}, SeedSpec(1), {"m": t})
    written = emit(rec, "both", tmp_path)
    names = sorted(p.name for p in written)
    assert names == ["m.csv", "run.json"]
    with pytest.raises(ValueError):
        emit(rec, "yaml", tmp_path)


def test_mat_tuple_disk_roundtrip(tmp_path):
    tup = sample_tuple("gue", 2, 6, SeedSpec(3))
    path = tmp_path / "tuple.bin"
    save_mat_tuple(path, tup)
    sidecar = json.loads((tmp_path / "tuple.json").read_text())
    assert sidecar["k"] == 6 and sidecar["r"] == 2
    assert sidecar["hermitian_flags"] == [True, True]
    back = load_mat_tuple(path)
    for a, b in zip(tup, back):
        assert np.array_equal(a, b)


def test_mat_tuple_disk_flags_non_hermitian(tmp_path):
    u = sample_tuple("haar", 1, 5, SeedSpec(4))
    path = tmp_path / "u.bin"
    save_mat_tuple(path, u)
    sidecar = json.loads((tmp_path / "u.json").read_text())
    assert sidecar["hermitian_flags"] == [False]


def test_mat_tuple_disk_shape_mismatch(tmp_path):
    tup = sample_tuple("gue", 1, 4, SeedSpec(5))
    path = tmp_path / "t.bin"
    save_mat_tuple(path, tup)
    (tmp_path / "t.json").write_text(json.dumps({"k": 5, "r": 1,
                                                 "hermitian_flags": [True]}))
    with pytest.raises(ValueError):
        load_mat_tuple(path)
