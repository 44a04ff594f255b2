"""Linear extensions of Lipschitz maps to molecule spaces."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .metric_space import PointedMetricSpace
from .molecule import Molecule, add, chi, random_molecule, scale, zero
from .transport_norm import norm


class LinearizeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MoleculeLinearMap:
    """Linear map Mol(source) -> Mol(target) fixed by the images of each chi_x."""

    source: PointedMetricSpace
    target: PointedMetricSpace
    image_of_chi: tuple[Molecule, ...]

    def __post_init__(self):
        if len(self.image_of_chi) != self.source.n:
            raise LinearizeError("need one image per source point")
        if not self.image_of_chi[self.source.base].is_zero:
            raise LinearizeError("chi(base) must map to the zero molecule")

    def __eq__(self, other) -> bool:
        if not isinstance(other, MoleculeLinearMap):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.image_of_chi == other.image_of_chi)

    __hash__ = None

    def apply(self, m: Molecule) -> Molecule:
        if m.space != self.source:
            raise LinearizeError("molecule is not on the source space")
        out = zero(self.target)
        # m = sum_x m(x) chi_x because the coefficients sum to zero
        for x, c in m.coeffs.items():
            if x != self.source.base:
                out = add(out, scale(c, self.image_of_chi[x]))
        return out

    __call__ = apply

    def to_json(self) -> dict:
        return {
            "source_points": list(self.source.points),
            "target_points": list(self.target.points),
            "image_of_chi": {
                self.source.points[x]: img.to_json()["coeffs"]
                for x, img in enumerate(self.image_of_chi)
            },
        }


def _point_map(source, target, f) -> list[int]:
    if isinstance(f, Mapping):
        out = [None] * source.n
        for k, v in f.items():
            out[source.index(k)] = target.index(v)
        if any(v is None for v in out):
            missing = [source.points[i] for i, v in enumerate(out) if v is None]
            raise LinearizeError(f"point map is not total; missing {missing}")
        return out
    out = [target.index(v) for v in f]
    if len(out) != source.n:
        raise LinearizeError(f"point map has {len(out)} entries for {source.n} points")
    return out


def lipschitz_constant_of_map(source, target, f) -> object:
    fx = _point_map(source, target, f)
    best = source.zero()
    for x in range(source.n):
        for y in range(x + 1, source.n):
            r = target.dist[fx[x]][fx[y]] / source.dist[x][y]
            if r > best:
                best = r
    return best


def linearize_map(source: PointedMetricSpace, target: PointedMetricSpace, f
                  ) -> MoleculeLinearMap:
    """Extension of a base-preserving point map; ``chi_x`` goes to ``chi_{f(x)}``."""
    fx = _point_map(source, target, f)
    if fx[source.base] != target.base:
        raise LinearizeError(
            f"map sends base {source.base_label!r} to {target.points[fx[source.base]]!r}, "
            f"not to {target.base_label!r}"
        )
    return MoleculeLinearMap(source, target, tuple(chi(target, y) for y in fx))


def compose(outer: MoleculeLinearMap, inner: MoleculeLinearMap) -> MoleculeLinearMap:
    if inner.target != outer.source:
        raise LinearizeError("maps are not composable")
    return MoleculeLinearMap(inner.source, outer.target,
                             tuple(outer.apply(img) for img in inner.image_of_chi))


def commuting_square_report(source, target, f) -> dict:
    """Check ``apply(f_bar, chi1(x)) == chi2(f(x))`` for every source point."""
    fbar = linearize_map(source, target, f)
    fx = _point_map(source, target, f)
    bad = [source.points[x] for x in range(source.n)
           if fbar.apply(chi(source, x)) != chi(target, fx[x])]
    return {"ok": not bad, "failures": bad, "points_checked": source.n}


@dataclass(frozen=True)
class NormedWindow:
    """R^k with the l1, l2 or l-infinity norm."""

    k: int
    p: object = 2

    def __post_init__(self):
        if self.p not in (1, 2, np.inf, "inf"):
            raise ValueError(f"p must be 1, 2 or inf, got {self.p!r}")
        if self.k < 1:
            raise ValueError("dimension must be positive")

    def norm(self, v) -> float:
        v = np.asarray(v, dtype=float)
        return float(np.linalg.norm(v, ord=np.inf if self.p == "inf" else self.p))


@dataclass(frozen=True, eq=False)
class VectorExtension:
    """The bounded linear map ``T_f(m) = sum_x m(x) f(x)`` into a normed window."""

    space: PointedMetricSpace
    values: np.ndarray  # n x k
    window: NormedWindow

    def apply(self, m: Molecule) -> np.ndarray:
        out = np.zeros(self.window.k)
        for x, c in m.coeffs.items():
            out += float(c) * self.values[x]
        return out

    __call__ = apply

    def point_value(self, x) -> np.ndarray:
        return self.values[self.space.index(x)]

    def lip(self) -> tuple[float, tuple[int, int] | None]:
        """Lipschitz constant of f in the window norm and a pair attaining it."""
        best, arg = 0.0, None
        n = self.space.n
        for x in range(n):
            for y in range(x + 1, n):
                r = self.window.norm(self.values[x] - self.values[y]) / float(self.space.dist[x][y])
                if r > best:
                    best, arg = r, (x, y)
        return best, arg


def universal_extension(space: PointedMetricSpace, f, window: NormedWindow | None = None
                        ) -> VectorExtension:
    """Linear extension of a vector-valued Lipschitz map vanishing at the base."""
    vals = np.asarray(f, dtype=float)
    if vals.ndim == 1:
        vals = vals[:, None]
    if vals.shape[0] != space.n:
        raise LinearizeError(f"need {space.n} rows of values, got {vals.shape[0]}")
    window = window or NormedWindow(vals.shape[1], 2)
    if vals.shape[1] != window.k:
        raise LinearizeError("value dimension does not match the window")
    if np.any(vals[space.base] != 0):
        raise LinearizeError("f(base) must be the zero vector")
    return VectorExtension(space, vals, window)


def operator_bound_check(T: VectorExtension, samples: int = 100, seed: int = 0,
                         tol: float = 1e-8) -> dict:
    """Sampled ``|T(m)| / ||m||`` against ``Lip(f)``, plus the attaining pair."""
    lip, pair_xy = T.lip()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        m = random_molecule(T.space, rng, support=min(T.space.n, 6))
        nm = float(norm(T.space, m))
        if nm == 0:
            continue
        worst = max(worst, T.window.norm(T.apply(m)) / nm)
    witness_ratio = 0.0
    witness = None
    if pair_xy is not None:
        x, y = pair_xy
        m = chi(T.space, x) - chi(T.space, y)
        witness_ratio = T.window.norm(T.apply(m)) / float(norm(T.space, m))
        witness = [T.space.points[x], T.space.points[y]]
    return {
        "lip": lip,
        "max_sampled_ratio": worst,
        "witness_pair": witness,
        "witness_ratio": witness_ratio,
        "bound_ok": worst <= lip + tol,
        "attained": abs(witness_ratio - lip) <= tol,
    }
