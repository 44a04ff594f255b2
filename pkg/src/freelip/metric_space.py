"""Finite pointed metric spaces: validation, generators, equidistant adjunction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import numeric
from .numeric import EXACT, FLOAT, Number

DEFAULT_TOL = 1e-9


class MetricStructureError(ValueError):
    """The input cannot be read as a distance matrix at all."""


class InvalidMetricError(ValueError):
    """A well-formed matrix fails one of the metric axioms."""

    def __init__(self, message: str, report: "ValidationReport | None" = None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class Violation:
    kind: str
    witness: tuple[int, ...]
    labels: tuple[str, ...]
    amount: Number

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "witness": list(self.labels),
            "indices": list(self.witness),
            "amount": numeric.to_json(self.amount),
        }


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return bool(self.violations)

    def __len__(self) -> int:
        return len(self.violations)

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_json() for v in self.violations]}


@dataclass(frozen=True, eq=False)
class PointedMetricSpace:
    """Points, a dense distance matrix and the index of the base point.

    Construction only checks the shape of the data; the metric axioms are
    checked by :func:`validate` (cached in :attr:`report`).
    """

    points: tuple[str, ...]
    dist: tuple[tuple[Number, ...], ...]
    base: int = 0
    mode: str = FLOAT
    _index: dict = field(init=False, repr=False, compare=False)

    def __init__(self, points, dist, base=0, mode: str | None = None):
        mode = mode or _infer_mode(dist)
        if mode not in numeric.MODES:
            raise MetricStructureError(f"unknown numeric mode {mode!r}")
        points = tuple(str(p) for p in points)
        if isinstance(dist, np.ndarray):
            dist = dist.tolist()
        rows = [list(r) for r in dist]
        n = len(points)
        if n == 0:
            raise MetricStructureError("a pointed metric space needs at least one point")
        if len(rows) != n or any(len(r) != n for r in rows):
            shape = f"{len(rows)} rows of lengths {sorted({len(r) for r in rows})}"
            raise MetricStructureError(f"distance matrix must be {n}x{n}, got {shape}")
        if len(set(points)) != n:
            raise MetricStructureError("point labels must be unique")
        try:
            matrix = tuple(tuple(numeric.coerce(v, mode) for v in r) for r in rows)
        except (TypeError, ValueError) as exc:
            raise MetricStructureError(f"bad distance entry: {exc}") from exc
        if isinstance(base, str):
            if base not in points:
                raise MetricStructureError(f"base {base!r} is not a point")
            base = points.index(base)
        if not isinstance(base, (int, np.integer)) or not 0 <= base < n:
            raise MetricStructureError(f"base index {base!r} out of range")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "dist", matrix)
        object.__setattr__(self, "base", int(base))
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(points)})

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, PointedMetricSpace):
            return NotImplemented
        return (
            self.points == other.points
            and self.base == other.base
            and self.mode == other.mode
            and self.dist == other.dist
        )

    __hash__ = object.__hash__

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def exact(self) -> bool:
        return self.mode == EXACT

    @property
    def base_label(self) -> str:
        return self.points[self.base]

    @cached_property
    def matrix(self) -> np.ndarray:
        """Float copy of the distance matrix (read-only)."""
        m = np.array([[float(v) for v in row] for row in self.dist], dtype=float)
        m.setflags(write=False)
        return m

    @cached_property
    def report(self) -> ValidationReport:
        return validate(self)

    def index(self, point) -> int:
        """Index of ``point`` given as a label or an index."""
        if isinstance(point, (int, np.integer)) and not isinstance(point, bool):
            if 0 <= point < self.n:
                return int(point)
            raise KeyError(f"point index {point} out of range for {self.n} points")
        try:
            return self._index[str(point)]
        except KeyError:
            raise KeyError(f"unknown point {point!r}") from None

    def d(self, x, y) -> Number:
        return self.dist[self.index(x)][self.index(y)]

    def zero(self) -> Number:
        return numeric.zero(self.mode)

    def coerce(self, value) -> Number:
        return numeric.coerce(value, self.mode)

    @property
    def diameter(self) -> Number:
        return max((max(r) for r in self.dist), default=self.zero())

    def with_base(self, base) -> "PointedMetricSpace":
        return PointedMetricSpace(self.points, self.dist, self.index(base), self.mode)

    def as_mode(self, mode: str) -> "PointedMetricSpace":
        if mode == self.mode:
            return self
        return PointedMetricSpace(self.points, self.dist, self.base, mode)

    def require_valid(self) -> None:
        if not self.report.ok:
            first = self.report.violations[0]
            raise InvalidMetricError(
                f"not a metric: {first.kind} violated at {first.labels}", self.report
            )

    def to_json(self) -> dict:
        return {
            "points": list(self.points),
            "base": self.base_label,
            "dist": [[numeric.to_json(v) for v in row] for row in self.dist],
        }


def _infer_mode(dist) -> str:
    if isinstance(dist, np.ndarray):
        return FLOAT
    for row in dist:
        for v in row:
            if isinstance(v, float):
                return FLOAT
            if not isinstance(v, (int, Fraction, str)) or isinstance(v, bool):
                return FLOAT
    # all integers, fractions or strings
    return EXACT if any(
        isinstance(v, (Fraction, str)) for row in dist for v in row
    ) else FLOAT


def validate(space: PointedMetricSpace, tol: float = DEFAULT_TOL) -> ValidationReport:
    """List every violated metric axiom together with a witness.

    Exact spaces are checked without tolerance. In float mode ``tol`` is an
    absolute slack for the symmetry, diagonal and triangle checks; distinct
    points must still be at strictly positive distance.
    """
    n = space.n
    d = space.dist
    labels = space.points
    slack = 0 if space.exact else tol
    out: list[Violation] = []

    def add(kind, idx, amount):
        out.append(Violation(kind, idx, tuple(labels[i] for i in idx), amount))

    for i in range(n):
        if abs(d[i][i]) > slack:
            add("diagonal", (i, i), d[i][i])
    for i in range(n):
        for j in range(n):
            if i != j and d[i][j] <= 0:
                add("positivity", (i, j), d[i][j])
    for i in range(n):
        for j in range(i + 1, n):
            if abs(d[i][j] - d[j][i]) > slack:
                add("symmetry", (i, j), d[i][j] - d[j][i])
    if space.exact:
        for i in range(n):
            for j in range(n):
                dij = d[i][j]
                for k in range(n):
                    excess = d[i][k] - dij - d[j][k]
                    if excess > 0:
                        add("triangle", (i, j, k), excess)
    else:
        m = space.matrix
        # excess[i, j, k] = d(i,k) - d(i,j) - d(j,k)
        excess = m[:, None, :] - m[:, :, None] - m[None, :, :]
        for i, j, k in zip(*np.nonzero(excess > tol)):
            add("triangle", (int(i), int(j), int(k)), float(excess[i, j, k]))
    if not (0 <= space.base < n):
        add("base", (space.base,), 0)
    return ValidationReport(tuple(out))


def shortest_path_closure(weights, mode: str = FLOAT):
    """All-pairs shortest paths of a symmetric nonnegative weight matrix.

    ``inf`` (or ``None`` in exact mode) marks a missing edge. Returns a list of
    lists in the requested mode; unreachable pairs stay ``math.inf``.
    """
    n = len(weights)
    if mode == FLOAT:
        D = np.array(
            [[math.inf if w is None else float(w) for w in row] for row in weights],
            dtype=float,
        )
        np.fill_diagonal(D, 0.0)
        for k in range(n):
            D = np.minimum(D, D[:, k, None] + D[None, k, :])
        return D.tolist()
    D = [[None if w is None or w == math.inf else numeric.to_exact(w) for w in row]
         for row in weights]
    for i in range(n):
        D[i][i] = Fraction(0)
    for k in range(n):
        Dk = D[k]
        for i in range(n):
            dik = D[i][k]
            if dik is None:
                continue
            Di = D[i]
            for j in range(n):
                dkj = Dk[j]
                if dkj is None:
                    continue
                cand = dik + dkj
                if Di[j] is None or cand < Di[j]:
                    Di[j] = cand
    return [[math.inf if v is None else v for v in row] for row in D]


def _labels(n: int, labels) -> list[str]:
    if labels is None:
        return [str(i) for i in range(n)]
    labels = [str(x) for x in labels]
    if len(labels) != n:
        raise MetricStructureError(f"expected {n} labels, got {len(labels)}")
    return labels


def from_points_in_plane(coords, p=2, labels=None, base=0, mode: str = FLOAT):
    """Metric induced by the l1, l2 or l-infinity norm on planar points."""
    pts = [tuple(c) for c in coords]
    n = len(pts)
    if p not in (1, 2, math.inf, "inf"):
        raise ValueError(f"p must be 1, 2 or inf, got {p!r}")
    if p == 2 and mode == EXACT:
        raise ValueError("the Euclidean norm is not exact over the rationals")
    dist = [[numeric.zero(mode)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            dx = numeric.coerce(pts[i][0], mode) - numeric.coerce(pts[j][0], mode)
            dy = numeric.coerce(pts[i][1], mode) - numeric.coerce(pts[j][1], mode)
            if p == 1:
                dist[i][j] = abs(dx) + abs(dy)
            elif p == 2:
                dist[i][j] = math.hypot(dx, dy)
            else:
                dist[i][j] = max(abs(dx), abs(dy))
    return PointedMetricSpace(_labels(n, labels), dist, base, mode)


def from_graph(edges: Iterable[Sequence], labels=None, n: int | None = None,
               base=0, mode: str = FLOAT) -> PointedMetricSpace:
    """Shortest-path metric of an undirected weighted graph.

    ``edges`` holds ``(u, v)`` or ``(u, v, w)`` items, with vertices given as
    indices (or as labels when ``labels`` is supplied). Missing weights are 1.
    """
    edges = [tuple(e) for e in edges]
    if labels is not None:
        labels = _labels(len(labels), labels)
        pos = {lab: i for i, lab in enumerate(labels)}

        def idx(v):
            if isinstance(v, int) and not isinstance(v, bool) and str(v) not in pos:
                return v
            return pos[str(v)]
        n = len(labels)
    else:
        if n is None:
            n = 1 + max((max(int(e[0]), int(e[1])) for e in edges), default=0)
        labels = _labels(n, None)

        def idx(v):
            return int(v)
    W = [[None] * n for _ in range(n)]
    for e in edges:
        u, v = idx(e[0]), idx(e[1])
        w = numeric.coerce(e[2] if len(e) > 2 else 1, mode)
        if w <= 0:
            raise ValueError(f"edge {e!r} has nonpositive weight")
        if u == v:
            continue
        if W[u][v] is None or w < W[u][v]:
            W[u][v] = W[v][u] = w
    D = shortest_path_closure(W, mode)
    for i in range(n):
        for j in range(n):
            if D[i][j] == math.inf:
                raise ValueError(
                    f"graph is disconnected: no path between {labels[i]!r} and {labels[j]!r}"
                )
    return PointedMetricSpace(labels, D, base, mode)


def random_metric(n: int, seed: int = 0, mode: str = FLOAT, low=1, high=10,
                  base=0) -> PointedMetricSpace:
    """Shortest-path closure of a random symmetric matrix.

    Float mode draws uniform weights in ``[low, high)``; exact mode draws
    integers in ``[low, high]``. Weights are at least ``low`` > 0, so distinct
    points never collapse.
    """
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    if mode == EXACT:
        raw = rng.integers(low, high + 1, size=(n, n))
        W = [[int(raw[min(i, j), max(i, j)]) for j in range(n)] for i in range(n)]
    else:
        raw = rng.uniform(low, high, size=(n, n))
        W = [[float(raw[min(i, j), max(i, j)]) for j in range(n)] for i in range(n)]
    D = shortest_path_closure(W, mode)
    return PointedMetricSpace(_labels(n, None), D, base, mode)


def line_space(n: int = 3, mode: str = FLOAT) -> PointedMetricSpace:
    """Points ``0..n-1`` on the real line with base ``0``."""
    dist = [[numeric.coerce(abs(i - j), mode) for j in range(n)] for i in range(n)]
    return PointedMetricSpace([str(i) for i in range(n)], dist, 0, mode)


class EquidistantError(ValueError):
    def __init__(self, message: str, witness: tuple | None = None):
        super().__init__(message)
        self.witness = witness


def adjoin_equidistant(space: PointedMetricSpace, c0=None, label: str | None = None
                       ) -> PointedMetricSpace:
    """Append a new base point at distance ``c0`` from every existing point.

    The base of ``space`` is ignored. ``c0`` defaults to half the diameter
    and must satisfy ``c0 > 0`` and ``2*c0 >= diam``.
    """
    n = space.n
    mode = space.mode
    diam = space.diameter
    if c0 is None:
        if diam <= 0:
            raise EquidistantError("single-point space: c0 must be given explicitly")
        c0 = diam / 2
    c0 = numeric.coerce(c0, mode)
    if c0 <= 0:
        raise EquidistantError(f"c0 must be positive, got {c0}")
    for i in range(n):
        for j in range(n):
            if space.dist[i][j] > 2 * c0:
                witness = (space.points[i], label or "<new>", space.points[j])
                raise EquidistantError(
                    f"c0={c0} violates the triangle inequality: "
                    f"d({space.points[i]},{space.points[j]})={space.dist[i][j]} > 2*c0",
                    witness,
                )
    if label is None:
        label = "o"
        while label in space.points:
            label += "'"
    elif label in space.points:
        raise ValueError(f"label {label!r} already used")
    dist = [list(row) + [c0] for row in space.dist]
    dist.append([c0] * n + [numeric.zero(mode)])
    return PointedMetricSpace(list(space.points) + [label], dist, n, mode)


def equidistant_constant(space: PointedMetricSpace, tol: float = 0.0):
    """Return ``c0`` if the base is equidistant from all other points, else None."""
    others = [space.dist[space.base][x] for x in range(space.n) if x != space.base]
    if not others:
        return None
    c0 = others[0]
    slack = 0 if space.exact else tol
    if c0 <= 0 or any(abs(v - c0) > slack for v in others):
        return None
    return c0
