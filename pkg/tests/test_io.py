import csv
import io

import numpy as np
import pytest

from gmqr import Dataset, SimSpec, generate
from gmqr.errors import DataError
from gmqr.io import load_dataset, load_truth, read_csv, save_dataset, save_truth, truth_path, write_csv


def test_write_csv_rfc4180(tmp_path):
    path = tmp_path / "t.csv"
    write_csv(path, ["a", "b,c", "d"], [[1, 0.1, True], ["x\"y", 1e-300, False]])
    raw = path.read_bytes()
    assert raw.count(b"\r\n") == 3 and raw.endswith(b"\r\n")
    assert raw.splitlines()[0] == b'a,"b,c",d'
    rows = list(csv.reader(io.StringIO(raw.decode())))
    assert rows[1] == ["1", "0.1", "true"]
    assert rows[2] == ['x"y', "1e-300", "false"]


def test_floats_round_trip_exactly(tmp_path):
    vals = np.random.default_rng(0).standard_normal(50) * 10.0 ** np.arange(-25, 25)
    path = tmp_path / "f.csv"
    write_csv(path, ["v"], [[v] for v in vals])
    _, body = read_csv(path)
    np.testing.assert_array_equal([float(r[0]) for r in body], vals)


def test_dataset_round_trip(tmp_path):
    d, truth = generate(SimSpec(n=20, p=3, seed=4))
    path = tmp_path / "d.csv"
    save_dataset(d, path)
    back = load_dataset(path)
    np.testing.assert_array_equal(back.X, d.X)
    np.testing.assert_array_equal(back.y, d.y)
    assert not load_dataset(path, has_intercept=False).has_intercept


@pytest.mark.parametrize("text, match", [
    ("", "empty"),
    ("a,b\n1,2\n", "header"),
    ("x1,y\n", "no data"),
    ("x1,y\n1,abc\n", "non-numeric"),
    ("x1,y\n1,2,3\n", "fields"),
])
def test_load_dataset_errors(tmp_path, text, match):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(DataError, match=match):
        load_dataset(path)


def test_truth_sidecar(tmp_path):
    spec = SimSpec(model="3.4", n=5, p=2, seed=1)
    _, truth = generate(spec)
    assert truth_path(tmp_path / "run.csv") == tmp_path / "run.truth.json"
    save_truth(tmp_path / "run.truth.json", spec, truth)
    beta, doc = load_truth(tmp_path / "run.truth.json")
    np.testing.assert_array_equal(beta, truth)
    assert SimSpec.from_dict(doc["spec"]) == spec
    assert doc["has_intercept"] is True


def test_intercept_only_dataset_written(tmp_path):
    d = Dataset(np.empty((3, 0)), np.array([1.0, 2.0, 3.0]))
    save_dataset(d, tmp_path / "y.csv")
    assert load_dataset(tmp_path / "y.csv").p == 0
