"""Lip0(M): Lipschitz functions vanishing at the base point."""

from __future__ import annotations

from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from . import numeric
from .metric_space import PointedMetricSpace


class LipFunctionError(ValueError):
    pass


def lip_constant(space: PointedMetricSpace, values: Sequence):
    """Largest ratio ``|f(x) - f(y)| / d(x, y)`` over distinct pairs."""
    if len(values) != space.n:
        raise LipFunctionError(f"expected {space.n} values, got {len(values)}")
    if values[space.base] != 0:
        raise LipFunctionError(f"f(base) = {values[space.base]}, must be 0")
    n = space.n
    if n < 2:
        return space.zero()
    if space.exact:
        best = space.zero()
        d = space.dist
        for i in range(n):
            for j in range(i + 1, n):
                r = abs(values[i] - values[j]) / d[i][j]
                if r > best:
                    best = r
        return best
    v = np.asarray(values, dtype=float)
    iu = np.triu_indices(n, 1)
    ratios = np.abs(v[:, None] - v[None, :])[iu] / space.matrix[iu]
    return float(ratios.max())


class LipFunction:
    """Dense values on the points of a space, with ``f(base) == 0``."""

    def __init__(self, space: PointedMetricSpace, values):
        if isinstance(values, Mapping):
            dense = [space.zero()] * space.n
            for k, v in values.items():
                dense[space.index(k)] = space.coerce(v)
            values = dense
        values = tuple(space.coerce(v) for v in values)
        if len(values) != space.n:
            raise LipFunctionError(f"expected {space.n} values, got {len(values)}")
        if values[space.base] != 0:
            raise LipFunctionError(f"f(base) = {values[space.base]}, must be exactly 0")
        self.space = space
        self.values = values

    def __repr__(self) -> str:
        return f"LipFunction({list(self.values)!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, LipFunction):
            return NotImplemented
        return self.space == other.space and self.values == other.values

    __hash__ = None

    def __call__(self, point):
        return self.values[self.space.index(point)]

    def __getitem__(self, point):
        return self(point)

    @cached_property
    def lip(self):
        return lip_constant(self.space, self.values)

    def scaled(self, c) -> "LipFunction":
        c = self.space.coerce(c)
        return LipFunction(self.space, [c * v for v in self.values])

    def to_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.values])

    def to_json(self) -> dict:
        return {"values": {p: numeric.to_json(v)
                           for p, v in zip(self.space.points, self.values)}}


def zero_function(space: PointedMetricSpace) -> LipFunction:
    return LipFunction(space, [space.zero()] * space.n)


def distance_to_base(space: PointedMetricSpace) -> LipFunction:
    return LipFunction(space, [space.dist[x][space.base] for x in range(space.n)])


def from_json(space: PointedMetricSpace, doc: Mapping) -> LipFunction:
    raw = doc.get("values") if isinstance(doc, Mapping) else None
    if not isinstance(raw, Mapping):
        raise LipFunctionError('function document needs a "values" object keyed by label')
    vals = [space.zero()] * space.n
    for k, v in raw.items():
        vals[space.index(str(k))] = space.coerce(v)
    return LipFunction(space, vals)


def in_dual_ball(f: LipFunction, tol: float = 1e-9) -> bool:
    """Whether ``Lip(f) <= 1 + tol`` (additive tolerance)."""
    if f.space.exact and tol == 0:
        return f.lip <= 1
    return float(f.lip) <= 1 + tol


def pointwise_dist(f: LipFunction, g: LipFunction, window=None):
    """Sup distance between ``f`` and ``g`` over ``window`` (default: all points)."""
    if f.space is not g.space and f.space != g.space:
        raise LipFunctionError("functions live on different spaces")
    if window is None:
        idx = range(f.space.n)
    else:
        idx = [f.space.index(w) for w in window]
        if not idx:
            raise LipFunctionError("window must be nonempty")
    return max(abs(f.values[i] - g.values[i]) for i in idx)


def mcshane_extend(space: PointedMetricSpace, subset, values, L, tol: float = 1e-12
                   ) -> LipFunction:
    """Extend ``L``-Lipschitz data on ``subset`` by ``min_s (f(s) + L d(x, s))``.

    ``values`` is either a mapping from subset points or a sequence aligned with
    ``subset``. The base point must belong to ``subset`` with value 0.
    """
    idx = [space.index(s) for s in subset]
    if isinstance(values, Mapping):
        vals = {space.index(k): space.coerce(v) for k, v in values.items()}
        data = [(i, vals[i]) for i in idx]
    else:
        data = [(i, space.coerce(v)) for i, v in zip(idx, values, strict=True)]
    L = space.coerce(L)
    if L < 0:
        raise LipFunctionError("L must be nonnegative")
    given = dict(data)
    if space.base not in given or given[space.base] != 0:
        raise LipFunctionError("subset must contain the base point with value 0")
    slack = 0 if space.exact else tol
    d = space.dist
    for a, (i, fi) in enumerate(data):
        for j, fj in data[a + 1:]:
            if abs(fi - fj) > L * d[i][j] + slack:
                raise LipFunctionError(
                    f"data is not {L}-Lipschitz on the subset: "
                    f"|f({space.points[i]}) - f({space.points[j]})| > {L}*d"
                )
    out = []
    for x in range(space.n):
        if x in given:
            out.append(given[x])
        else:
            out.append(min(fs + L * d[x][s] for s, fs in data))
    return LipFunction(space, out)
