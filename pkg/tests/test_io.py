import json

import numpy as np
import pytest

from igsp.errors import DatasetError
from igsp.graph import Dag, InterventionFamily
from igsp.io import load_dataset, read_edges, write_edges, write_manifest, write_samples


def make_manifest(tmp_path, regimes, variables=("A", "B", "C"), rows=None):
    files = []
    for k, _ in enumerate(regimes):
        f = tmp_path / f"r{k}.csv"
        f.write_text(rows if rows is not None else "1,2,3\n4,5,6.5\n")
        files.append(f.name)
    doc = {
        "variables": list(variables),
        "regimes": [{"targets": t, "data": f} for t, f in zip(regimes, files)],
    }
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    return path


def test_single_observational_regime(tmp_path):
    family, data, names = load_dataset(make_manifest(tmp_path, [[]]))
    assert family == InterventionFamily()
    assert len(data) == 1 and data[0].n == 2
    assert names == {"A": 0, "B": 1, "C": 2}
    assert data[0].samples[1, 2] == 6.5


def test_targets_are_mapped(tmp_path):
    loaded = load_dataset(make_manifest(tmp_path, [[], ["C", "A"]]))
    assert loaded.family == InterventionFamily.of((), {0, 2})
    assert loaded.variables == ["A", "B", "C"]


def test_regime_zero_must_be_observational(tmp_path):
    with pytest.raises(DatasetError, match="regime 0"):
        load_dataset(make_manifest(tmp_path, [["A"]]))


def test_unknown_target_is_named(tmp_path):
    with pytest.raises(DatasetError, match="'Z'"):
        load_dataset(make_manifest(tmp_path, [[], ["Z"]]))


def test_missing_manifest(tmp_path):
    with pytest.raises(DatasetError, match="not found"):
        load_dataset(tmp_path / "nope.json")


def test_missing_data_file(tmp_path):
    path = make_manifest(tmp_path, [[]])
    (tmp_path / "r0.csv").unlink()
    with pytest.raises(DatasetError, match="r0.csv: data file not found"):
        load_dataset(path)


def test_column_mismatch_reports_line(tmp_path):
    path = make_manifest(tmp_path, [[]], rows="1,2,3\n1,2\n")
    with pytest.raises(DatasetError, match=r"r0.csv:2: column mismatch"):
        load_dataset(path)


def test_non_numeric_cell_reports_line(tmp_path):
    path = make_manifest(tmp_path, [[]], rows="1,2,3\n1,x,3\n")
    with pytest.raises(DatasetError, match=r"r0.csv:2: non-numeric cell 'x'"):
        load_dataset(path)


def test_invalid_json(tmp_path):
    path = tmp_path / "m.json"
    path.write_text("{\n  nope")
    with pytest.raises(DatasetError, match="m.json:2: invalid JSON"):
        load_dataset(path)


def test_samples_round_trip_exactly(tmp_path):
    x = np.random.default_rng(0).standard_normal((20, 3)) * 1e-7
    write_samples(tmp_path / "r0.csv", x)
    write_manifest(tmp_path / "m.json", ["A", "B", "C"], InterventionFamily(), ["r0.csv"])
    _, data, _ = load_dataset(tmp_path / "m.json")
    assert np.array_equal(data[0].samples, x)


def test_edges_round_trip_sorted(tmp_path):
    names = {"b": 0, "a": 1, "c": 2}
    g = Dag(3, {(0, 2), (1, 0), (1, 2)})
    write_edges(tmp_path / "g.edges", g, ["b", "a", "c"])
    assert (tmp_path / "g.edges").read_text() == "a,b\na,c\nb,c\n"
    assert read_edges(tmp_path / "g.edges", names) == g


def test_edges_unknown_name(tmp_path):
    (tmp_path / "g.edges").write_text("a,q\n")
    with pytest.raises(DatasetError, match="g.edges:1: unknown variable 'q'"):
        read_edges(tmp_path / "g.edges", {"a": 0})
