"""Reading and writing the JSON/CSV file formats."""

from __future__ import annotations

import csv
import json
from decimal import Decimal
from pathlib import Path

from . import numeric
from .metric_space import MetricStructureError, PointedMetricSpace


class InputError(ValueError):
    """A malformed input file; the message names the file and location."""


def read_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: cannot read file ({exc.strerror})") from None
    try:
        # Decimal keeps the literal digits so exact mode can read them losslessly
        return json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None


def _space_from_doc(doc, where: str, mode: str) -> PointedMetricSpace:
    if not isinstance(doc, dict):
        raise InputError(f"{where}: expected a JSON object with points/base/dist")
    for key in ("points", "dist"):
        if key not in doc:
            raise InputError(f"{where}: missing key {key!r}")
    points = doc["points"]
    if not isinstance(points, list):
        raise InputError(f"{where}: 'points' must be a list")
    base = doc.get("base", points[0] if points else None)
    dist = doc["dist"]
    if not isinstance(dist, list) or not all(isinstance(r, list) for r in dist):
        raise InputError(f"{where}: 'dist' must be a list of rows")
    for r, row in enumerate(dist):
        for c, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, (int, Decimal, str, float)):
                raise InputError(f"{where}: dist[{r}][{c}] is not a number: {v!r}")
    try:
        return PointedMetricSpace(points, dist, str(base), mode)
    except MetricStructureError as exc:
        raise InputError(f"{where}: {exc}") from None


def load_space(path, mode: str | None = None) -> PointedMetricSpace:
    """Read a space from ``.json`` or ``.csv`` (header row of labels, base first)."""
    mode = mode or numeric.default_mode()
    path = Path(path)
    if path.suffix.lower() == ".csv":
        try:
            with path.open(newline="", encoding="utf-8") as fh:
                rows = [r for r in csv.reader(fh) if r]
        except OSError as exc:
            raise InputError(f"{path}: cannot read file ({exc.strerror})") from None
        if not rows:
            raise InputError(f"{path}: empty CSV")
        labels = [c.strip() for c in rows[0]]
        body = rows[1:]
        for r, row in enumerate(body, start=2):
            if len(row) != len(labels):
                raise InputError(f"{path}:{r}: expected {len(labels)} columns, got {len(row)}")
        try:
            return PointedMetricSpace(labels, [[c.strip() for c in r] for r in body],
                                      labels[0], mode)
        except MetricStructureError as exc:
            raise InputError(f"{path}: {exc}") from None
    return _space_from_doc(read_json(path), str(path), mode)


def space_to_json(space: PointedMetricSpace) -> dict:
    return space.to_json()


def write_space_csv(space: PointedMetricSpace, path) -> None:
    """CSV has no base field; the base is written as the first column."""
    order = [space.base] + [i for i in range(space.n) if i != space.base]
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([space.points[i] for i in order])
        for i in order:
            w.writerow([numeric.to_json(space.dist[i][j]) for j in order])


def dumps(doc) -> str:
    """Deterministic JSON text."""
    return json.dumps(doc, sort_keys=True, indent=2, default=_default)


def _default(obj):
    if isinstance(obj, Decimal):
        return str(obj)
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if isinstance(obj, (set, frozenset, tuple)):
        return list(obj)
    return numeric.to_json(obj)
