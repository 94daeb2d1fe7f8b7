"""CSV and JSON persistence for datasets, simulation truths and results."""
import csv
import json
from pathlib import Path

import numpy as np

from .errors import DataError
from .model import Dataset


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path_or_file, header, rows):
    """RFC 4180 CSV (CRLF line ends, minimal quoting); floats in shortest round-trip form."""
    def emit(fh):
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", newline="", encoding="utf-8") as fh:
            emit(fh)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path}: empty CSV")
    return rows[0], rows[1:]


def save_dataset(dataset, path):
    header = [f"x{j + 1}" for j in range(dataset.p)] + ["y"]
    write_csv(path, header, np.column_stack([dataset.X, dataset.y]).tolist())


def load_dataset(path, has_intercept=True):
    """Read a ``x1,...,xp,y`` CSV into a :class:`Dataset`."""
    header, body = read_csv(path)
    header = [h.strip() for h in header]
    p = len(header) - 1
    expected = [f"x{j + 1}" for j in range(p)] + ["y"]
    if header != expected:
        raise DataError(f"{path}: header must be {','.join(expected)}, got {','.join(header)}")
    try:
        values = np.array([[float(v) for v in row] for row in body if row], dtype=np.float64)
    except ValueError as exc:
        raise DataError(f"{path}: non-numeric entry ({exc})") from None
    if values.size == 0:
        raise DataError(f"{path}: no data rows")
    if values.shape[1] != p + 1:
        raise DataError(f"{path}: rows must have {p + 1} fields")
    return Dataset(values[:, :p], values[:, p], has_intercept=has_intercept)


def truth_path(csv_path):
    p = Path(csv_path)
    return p.with_name(p.stem + ".truth.json")


def save_truth(path, spec, truth):
    doc = {"beta_true": [float(b) for b in truth], "has_intercept": spec.intercept,
           "spec": spec.to_dict()}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_truth(path):
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return np.asarray(doc["beta_true"], dtype=np.float64), doc
