"""Distance oracles: lazily queried metrics on (possibly infinite) point sets.

Descriptors are plain hashable Python values: integers for the half-line,
integer tuples for grids, letter tuples for trees and floats for the circle.
"""

from __future__ import annotations

import json
import math
from typing import Callable, Hashable, Iterable, Sequence

from .metric_space import PointedMetricSpace


class OracleAsymmetryError(ValueError):
    pass


class DistanceOracle:
    """Wrap a distance callback; check symmetry and the diagonal on queried pairs."""

    def __init__(self, distance: Callable[[Hashable, Hashable], float], base: Hashable,
                 name: str = "oracle", parse: Callable | None = None, tol: float = 0.0):
        self._distance = distance
        self.base = base
        self.name = name
        self._parse = parse
        self.tol = tol
        self._checked: set = set()

    def __repr__(self) -> str:
        return f"DistanceOracle({self.name!r}, base={self.base!r})"

    def parse(self, raw):
        """Turn a JSON-loaded descriptor into this oracle's native form."""
        return self._parse(raw) if self._parse else raw

    def __call__(self, a, b):
        dab = self._distance(a, b)
        if dab < 0 or (isinstance(dab, float) and math.isnan(dab)):
            raise ValueError(f"{self.name}: negative or NaN distance between {a!r} and {b!r}")
        key = (a, b) if _order_key(a) <= _order_key(b) else (b, a)
        if key not in self._checked:
            if a == b:
                if dab != 0:
                    raise OracleAsymmetryError(f"{self.name}: d({a!r},{a!r}) = {dab} != 0")
            else:
                dba = self._distance(b, a)
                if abs(dab - dba) > self.tol:
                    raise OracleAsymmetryError(
                        f"{self.name}: d({a!r},{b!r}) = {dab} but d({b!r},{a!r}) = {dba}"
                    )
            self._checked.add(key)
        return dab

    def window_space(self, window: Sequence, mode: str | None = None) -> PointedMetricSpace:
        """Materialize the finite subspace on ``window`` (the base is added if absent)."""
        pts = list(window)
        if self.base not in pts:
            pts.insert(0, self.base)
        dist = [[self(a, b) for b in pts] for a in pts]
        return PointedMetricSpace([descriptor_label(p) for p in pts], dist,
                                  pts.index(self.base), mode)


def _order_key(x):
    return repr(x)


def descriptor_label(p) -> str:
    if isinstance(p, str):
        return p
    if isinstance(p, tuple):
        return json.dumps(list(p))
    return json.dumps(p)


def space_oracle(space: PointedMetricSpace) -> DistanceOracle:
    """Oracle view of a finite space; descriptors are point labels."""
    def dist(a, b):
        return space.d(a, b)
    return DistanceOracle(dist, space.base_label, name="finite", parse=str)


def half_line() -> DistanceOracle:
    def dist(a, b):
        return abs(a - b)

    def parse(raw):
        v = int(raw)
        if v < 0 or v != raw:
            raise ValueError(f"half-line points are nonnegative integers, got {raw!r}")
        return v
    return DistanceOracle(dist, 0, name="half-line", parse=parse)


def integer_line() -> DistanceOracle:
    def parse(raw):
        if int(raw) != raw:
            raise ValueError(f"line points are integers, got {raw!r}")
        return int(raw)
    return DistanceOracle(lambda a, b: abs(a - b), 0, name="line", parse=parse)


def integer_grid(dim: int = 2, p=1) -> DistanceOracle:
    if p in ("inf", math.inf):
        def dist(a, b):
            return max(abs(x - y) for x, y in zip(a, b))
    elif p == 1:
        def dist(a, b):
            return sum(abs(x - y) for x, y in zip(a, b))
    elif p == 2:
        def dist(a, b):
            return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))
    else:
        raise ValueError(f"grid norm must be 1, 2 or inf, got {p!r}")

    def parse(raw):
        pt = tuple(int(v) for v in raw)
        if len(pt) != dim:
            raise ValueError(f"grid points have {dim} coordinates, got {raw!r}")
        return pt
    return DistanceOracle(dist, (0,) * dim, name=f"grid-l{p}", parse=parse)


def regular_tree(k: int = 3) -> DistanceOracle:
    """Infinite k-regular tree.

    Vertices are reduced words over letters ``0..k-1`` (no letter repeated
    twice in a row), i.e. the Cayley graph of a free product of k copies of
    Z/2. The root is the empty word.
    """
    if k < 2:
        raise ValueError("tree degree must be at least 2")

    def dist(a, b):
        common = 0
        for x, y in zip(a, b):
            if x != y:
                break
            common += 1
        return len(a) + len(b) - 2 * common

    def parse(raw):
        if isinstance(raw, str):
            raw = [int(c) for c in raw]
        word = tuple(int(c) for c in raw)
        for i, c in enumerate(word):
            if not 0 <= c < k or (i and word[i - 1] == c):
                raise ValueError(f"{raw!r} is not a reduced word for the {k}-regular tree")
        return word
    return DistanceOracle(dist, (), name=f"tree-{k}", parse=parse)


def circle(length: float = 1.0) -> DistanceOracle:
    """Circle of circumference ``length`` with the arc-length metric."""
    def dist(a, b):
        t = abs(a - b) % length
        return min(t, length - t)

    def parse(raw):
        return float(raw) % length
    return DistanceOracle(dist, 0.0, name="circle", parse=parse)


BUILTINS = {
    "half-line": half_line,
    "line": integer_line,
    "grid-l1": lambda: integer_grid(2, 1),
    "grid-l2": lambda: integer_grid(2, 2),
    "grid-linf": lambda: integer_grid(2, "inf"),
    "tree-2": lambda: regular_tree(2),
    "tree-3": lambda: regular_tree(3),
    "tree-4": lambda: regular_tree(4),
    "circle": circle,
}


def builtin(name: str) -> DistanceOracle:
    """Look up a built-in oracle by name; ``builtin:`` prefixes are accepted.

    ``tree-<k>`` works for any k >= 2.
    """
    if name.startswith("builtin:"):
        name = name[len("builtin:"):]
    if name in BUILTINS:
        return BUILTINS[name]()
    if name.startswith("tree-") and name[5:].isdigit():
        return regular_tree(int(name[5:]))
    raise KeyError(f"unknown builtin oracle {name!r}; available: {sorted(BUILTINS)}")


def parse_sequence(oracle: DistanceOracle, raw: Iterable) -> list:
    return [oracle.parse(r) for r in raw]
