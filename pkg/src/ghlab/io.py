"""File formats: spaces (JSON or CSV), interval unions, partitions, reports."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .intervals import IntervalUnion
from .metric import FiniteMetricSpace, validate
from .partition import Partition

__all__ = [
    "read_space",
    "write_space",
    "space_to_json",
    "read_intervals",
    "write_intervals",
    "read_partition",
    "write_partition",
    "dumps",
    "series_csv",
]


def _jsonable(obj):
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return obj
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return _jsonable(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    """Stable JSON: sorted keys, infinities as strings, trailing newline."""
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def space_to_json(X: FiniteMetricSpace) -> dict:
    return {"n": X.n, "d": X.tolist()}


def read_space(path, tol: float = 0.0) -> FiniteMetricSpace:
    """Load a space from ``.json`` (``{"n", "d"}``) or ``.csv`` (n rows of n values)."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
        d = [[float(c) for c in row] for row in rows]
    else:
        data = json.loads(text)
        d = data["d"]
        if "n" in data and int(data["n"]) != len(d):
            raise ValueError(f"{path}: n = {data['n']} but matrix has {len(d)} rows")
    return validate(d, tol=tol)


def write_space(X: FiniteMetricSpace, path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for row in X.d:
            w.writerow([repr(float(v)) for v in row])
        path.write_text(buf.getvalue())
    else:
        path.write_text(dumps(space_to_json(X)))


def read_intervals(path) -> IntervalUnion:
    return IntervalUnion.from_dict(json.loads(Path(path).read_text()))


def write_intervals(A: IntervalUnion, path) -> None:
    Path(path).write_text(dumps(A.to_dict()))


def read_partition(path, n_blocks: int | None = None) -> Partition:
    return Partition.from_dict(json.loads(Path(path).read_text()), n_blocks)


def write_partition(P: Partition, path) -> None:
    Path(path).write_text(dumps(P.to_dict()))


def series_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()
