"""Molecules: finitely supported, zero-sum coefficient maps on a space."""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

from . import numeric
from .metric_space import PointedMetricSpace

SUM_RTOL = 1e-12


class MoleculeError(ValueError):
    pass


class SpaceMismatchError(ValueError):
    pass


class Molecule:
    """Element of Mol(M), stored sparsely as ``{point index: coefficient}``.

    Exact zeros are dropped so that equality is structural. The coefficient
    sum must vanish (exactly in exact mode, up to a relative ``1e-12`` in
    float mode).
    """

    __slots__ = ("space", "coeffs")

    def __init__(self, space: PointedMetricSpace, coeffs: Mapping | None = None,
                 check: bool = True):
        clean = {}
        for key, value in (coeffs or {}).items():
            i = space.index(key)
            c = space.coerce(value)
            if c != 0:
                clean[i] = clean.get(i, space.zero()) + c
                if clean[i] == 0:
                    del clean[i]
        if check:
            total = sum(clean.values(), space.zero())
            if space.exact:
                if total != 0:
                    raise MoleculeError(f"coefficients sum to {total}, not 0")
            elif abs(total) > SUM_RTOL * sum(abs(c) for c in clean.values()):
                raise MoleculeError(f"coefficients sum to {total}, not 0")
        self.space = space
        self.coeffs = dict(sorted(clean.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{self.space.points[i]}: {c}" for i, c in self.coeffs.items())
        return f"Molecule({{{body}}})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Molecule):
            return NotImplemented
        return self.space == other.space and self.coeffs == other.coeffs

    __hash__ = None

    def __getitem__(self, point):
        return self.coeffs.get(self.space.index(point), self.space.zero())

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(-1, other))

    def __neg__(self):
        return scale(-1, self)

    def __rmul__(self, c):
        return scale(c, self)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def mass(self):
        """Total positive mass (equal to the total negative mass)."""
        return sum((c for c in self.coeffs.values() if c > 0), self.space.zero())

    def to_vector(self) -> np.ndarray:
        v = np.zeros(self.space.n)
        for i, c in self.coeffs.items():
            v[i] = float(c)
        return v

    def by_label(self) -> dict:
        return {self.space.points[i]: c for i, c in self.coeffs.items()}

    def to_json(self) -> dict:
        return {"coeffs": {k: numeric.to_json(v) for k, v in self.by_label().items()}}


def zero(space: PointedMetricSpace) -> Molecule:
    return Molecule(space, {})


def chi(space: PointedMetricSpace, x) -> Molecule:
    """The molecule ``x - base``; zero when ``x`` is the base."""
    i = space.index(x)
    if i == space.base:
        return Molecule(space, {})
    return Molecule(space, {i: 1, space.base: -1})


def _same_space(a: PointedMetricSpace, b: PointedMetricSpace) -> None:
    if a is not b and a != b:
        raise SpaceMismatchError("operands live on different spaces")


def add(m1: Molecule, m2: Molecule) -> Molecule:
    _same_space(m1.space, m2.space)
    out = dict(m1.coeffs)
    for i, c in m2.coeffs.items():
        out[i] = out.get(i, m1.space.zero()) + c
    return Molecule(m1.space, out, check=m1.space.exact)


def scale(c, m: Molecule) -> Molecule:
    c = m.space.coerce(c)
    return Molecule(m.space, {i: c * v for i, v in m.coeffs.items()}, check=m.space.exact)


def from_pairs(space: PointedMetricSpace, pairs: Iterable) -> Molecule:
    """Build ``sum c_i (x_i - y_i)`` from ``(c_i, x_i, y_i)`` triples."""
    out: dict[int, object] = {}
    for c, x, y in pairs:
        c = space.coerce(c)
        i, j = space.index(x), space.index(y)
        out[i] = out.get(i, space.zero()) + c
        out[j] = out.get(j, space.zero()) - c
    return Molecule(space, out, check=False)


def combination(space: PointedMetricSpace, scalars: Mapping) -> Molecule:
    """``sum_x r_x chi_x`` for a map from points to scalars."""
    out: dict[int, object] = {}
    for x, r in scalars.items():
        i = space.index(x)
        if i == space.base:
            continue
        r = space.coerce(r)
        out[i] = out.get(i, space.zero()) + r
        out[space.base] = out.get(space.base, space.zero()) - r
    return Molecule(space, out, check=False)


def pair(f, m: Molecule):
    """Evaluate the functional induced by ``f`` on ``m``: ``sum_x m(x) f(x)``."""
    _same_space(f.space, m.space)
    vals = f.values
    return sum((c * vals[i] for i, c in m.coeffs.items()), m.space.zero())


def from_json(space: PointedMetricSpace, doc: Mapping) -> Molecule:
    if "coeffs" in doc:
        coeffs = doc["coeffs"]
        if not isinstance(coeffs, Mapping):
            raise MoleculeError('"coeffs" must map point labels to numbers')
        return Molecule(space, {space.index(str(k)): v for k, v in coeffs.items()})
    if "pairs" in doc:
        triples = []
        for t in doc["pairs"]:
            if not isinstance(t, (list, tuple)) or len(t) != 3:
                raise MoleculeError(f"pair entries must be [c, x, y], got {t!r}")
            triples.append((t[0], str(t[1]), str(t[2])))
        return from_pairs(space, triples)
    raise MoleculeError('molecule document needs a "coeffs" or "pairs" key')


def random_molecule(space: PointedMetricSpace, rng: np.random.Generator,
                    support: int | None = None, integer: bool = False,
                    bound: int = 3) -> Molecule:
    """Random zero-sum molecule on at most ``support`` points."""
    n = space.n
    k = min(n, support or n)
    k = max(k, min(2, n))
    pts = rng.choice(n, size=k, replace=False)
    if integer or space.exact:
        vals = rng.integers(-bound, bound + 1, size=k - 1).tolist()
    else:
        vals = rng.normal(size=k - 1).tolist()
    coeffs = {int(p): v for p, v in zip(pts[:-1], vals)}
    if space.exact or integer:
        last = -sum(vals)
    else:
        last = -float(np.sum(vals))
    coeffs[int(pts[-1])] = last
    out = {}
    for i, c in coeffs.items():
        out[i] = space.coerce(c)
    if not space.exact:
        # absorb rounding of the float sum into the last coefficient
        drift = sum(out.values())
        out[int(pts[-1])] -= drift
    return Molecule(space, out)
