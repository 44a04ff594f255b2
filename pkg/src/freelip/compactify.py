"""The horofunction map a -> rho_a, the Gromov distance functions, and
pointwise limits of horofunctions over distance oracles."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from . import numeric
from .lip0 import LipFunction, pointwise_dist
from .limits import DEFAULT_TAIL, DEFAULT_TOL, tail_residual
from .metric_space import PointedMetricSpace, equidistant_constant
from .oracles import DistanceOracle, descriptor_label


class CompactifyError(ValueError):
    pass


def horofunction(space: PointedMetricSpace, a) -> LipFunction:
    """``x -> d(a, x) - d(a, base)`` for any point ``a``, the base included."""
    i = space.index(a)
    row = space.dist[i]
    da0 = row[space.base]
    return LipFunction(space, [row[x] - da0 for x in range(space.n)])


def rho(space: PointedMetricSpace, a) -> LipFunction:
    """``rho_a(x) = d(a, x) - d(a, base)`` for ``a != base``; ``rho_base = 0``.

    The formula evaluated at the base would give ``d(base, .)``, which is not
    the zero functional; the base is sent to 0 explicitly.
    """
    i = space.index(a)
    if i == space.base:
        return LipFunction(space, [space.zero()] * space.n)
    return horofunction(space, i)


def phi(space: PointedMetricSpace, x) -> tuple:
    """``phi_x(a) = rho_a(x)``, as a tuple indexed by ``a``."""
    j = space.index(x)
    d = space.dist
    return tuple(d[a][j] - d[a][space.base] for a in range(space.n))


def gromov_gamma(space: PointedMetricSpace, a) -> tuple:
    """Distance function ``gamma_a(x) = d(a, x)``; the base plays no role."""
    return tuple(space.dist[space.index(a)])


@dataclass(frozen=True)
class EmbeddingImage:
    functions: tuple[LipFunction, ...]
    injectivity: tuple[tuple[str, str], ...]
    identity_residual: object  # max |(sum of the two discrepancies) - 2 d(a, b)|
    pairwise: tuple[tuple, ...]

    @property
    def ok(self) -> bool:
        return not self.injectivity and self.identity_residual == 0

    def to_json(self) -> dict:
        sp = self.functions[0].space
        return {
            "points": list(sp.points),
            "functions": {sp.points[a]: [numeric.to_json(v) for v in f.values]
                          for a, f in enumerate(self.functions)},
            "injectivity_violations": [list(p) for p in self.injectivity],
            "identity_residual": numeric.to_json(self.identity_residual),
            "pairwise": [[numeric.to_json(v) for v in row] for row in self.pairwise],
        }


def embed_image(space: PointedMetricSpace, tol: float = 0.0) -> EmbeddingImage:
    """All ``rho_a``, their pairwise sup distances and an injectivity report.

    For distinct non-base ``a, b`` the discrepancies at ``a`` and at ``b``
    add up to ``2 d(a, b)``; the report carries the largest deviation from
    that identity, which is 0 up to rounding.
    """
    funcs = tuple(rho(space, a) for a in range(space.n))
    n = space.n
    pairwise = [[space.zero()] * n for _ in range(n)]
    bad = []
    resid = space.zero()
    for a in range(n):
        for b in range(a + 1, n):
            dist_ab = pointwise_dist(funcs[a], funcs[b])
            pairwise[a][b] = pairwise[b][a] = dist_ab
            if dist_ab <= tol:
                bad.append((space.points[a], space.points[b]))
            if space.base in (a, b):
                continue
            fa, fb = funcs[a].values, funcs[b].values
            two_d = (fb[a] - fa[a]) + (fa[b] - fb[b])
            resid = max(resid, abs(two_d - 2 * space.dist[a][b]))
    return EmbeddingImage(funcs, tuple(bad), resid, tuple(tuple(r) for r in pairwise))


@dataclass(frozen=True)
class SeparationReport:
    c0: object
    c1: object  # d(x0, B); None for empty B
    value_at_x0: object
    min_on_B: object
    margin: object
    ok: bool

    def to_json(self) -> dict:
        j = numeric.to_json
        return {
            "ok": self.ok,
            "c0": j(self.c0),
            "c1": None if self.c1 is None else j(self.c1),
            "value_at_x0": j(self.value_at_x0),
            "min_on_B": None if self.min_on_B is None else j(self.min_on_B),
            "margin": None if self.margin is None else j(self.margin),
        }


def separation_check(space: PointedMetricSpace, B: Iterable, x0, tol: float = 1e-12
                     ) -> SeparationReport:
    """Check that ``phi_{x0}`` separates ``x0`` from the set ``B``.

    Requires an equidistant base with constant ``c0``. Then
    ``phi_{x0}(x0) = -c0`` while ``phi_{x0}(b) >= d(x0, B) - c0`` on ``B``.
    """
    c0 = equidistant_constant(space, tol)
    if c0 is None:
        raise CompactifyError("base point is not equidistant")
    i0 = space.index(x0)
    if i0 == space.base:
        raise CompactifyError("x0 must differ from the base point")
    Bi = sorted({space.index(b) for b in B})
    if i0 in Bi:
        raise CompactifyError("x0 must not belong to B")
    f = phi(space, i0)
    at_x0 = f[i0]
    slack = 0 if space.exact else tol
    if not Bi:
        return SeparationReport(c0, None, at_x0, None, None, abs(at_x0 + c0) <= slack)
    c1 = min(space.dist[i0][b] for b in Bi)
    low = min(f[b] for b in Bi)
    margin = low - at_x0
    ok = (abs(at_x0 + c0) <= slack
          and all(f[b] >= c1 - c0 - slack for b in Bi)
          and margin >= c1 - slack)
    return SeparationReport(c0, c1, at_x0, low, margin, ok)


def gromov_offsets(space: PointedMetricSpace) -> dict:
    """``phi_x - gamma_x`` on the non-base points, for every non-base ``x``.

    With an equidistant base every entry equals ``-c0``.
    """
    c0 = equidistant_constant(space)
    others = [a for a in range(space.n) if a != space.base]
    worst = space.zero()
    values = set()
    for x in others:
        f, g = phi(space, x), gromov_gamma(space, x)
        for a in others:
            diff = f[a] - g[a]
            values.add(diff)
            if c0 is not None:
                worst = max(worst, abs(diff + c0))
    return {"c0": c0, "distinct_offsets": sorted(values), "max_deviation": worst}


def base_change_discrepancy(space: PointedMetricSpace, new_base) -> object:
    """Largest ``|rho_a - rho'_a - const_a|`` after moving the base point.

    Diagnostic only: changing the base shifts each horofunction by a
    constant, so this is 0 up to rounding.
    """
    other = space.with_base(new_base)
    worst = space.zero()
    for a in range(space.n):
        f, g = horofunction(space, a).values, horofunction(other, a).values
        diffs = [u - v for u, v in zip(f, g)]
        worst = max(worst, max(diffs) - min(diffs))
    return worst


@dataclass(frozen=True)
class LimitVerdict:
    kind: str  # converged | not_cauchy | budget_exhausted
    limit: dict | None
    residual: object
    classification: str | None = None  # interior | boundary (heuristic)
    nearest: object = None
    nearest_distance: object = None

    def to_json(self) -> dict:
        j = numeric.to_json
        return {
            "kind": self.kind,
            "limit": None if self.limit is None else {k: j(v) for k, v in self.limit.items()},
            "residual": j(self.residual),
            "classification": self.classification,
            "classification_note": "heuristic: compared against window points only",
            "nearest_interior": None if self.nearest is None else descriptor_label(self.nearest),
            "nearest_distance": None if self.nearest_distance is None else j(self.nearest_distance),
        }


def horolimit(oracle: DistanceOracle, sequence: Sequence, window: Sequence,
              tol: float = DEFAULT_TOL, tail: int = DEFAULT_TAIL) -> LimitVerdict:
    """Pointwise limit of ``rho_{a_n}`` restricted to a finite window.

    Converged when the last ``tail`` rows agree within ``tol``; otherwise
    ``budget_exhausted`` if the tail residual is still shrinking compared
    with the previous tail, else ``not_cauchy``. A converged limit is called
    interior when some window point ``a`` has ``rho_a`` within ``tol`` of it
    on the window and the sequence itself ends within ``tol`` of ``a``;
    otherwise boundary.
    """
    window = list(window)
    if oracle.base not in window:
        raise CompactifyError("window must contain the base point")
    if len(sequence) < 2 * tail:
        raise CompactifyError(f"need at least {2 * tail} sequence terms, got {len(sequence)}")
    base = oracle.base

    def rho_row(a):
        # same convention as rho: the base point gives the zero function
        if oracle(a, base) == 0:
            return [0] * len(window)
        da0 = oracle(a, base)
        return [oracle(a, w) - da0 for w in window]

    rows = [rho_row(a) for a in sequence]
    res = tail_residual(rows, tail)
    if res > tol:
        before = tail_residual(rows[:-tail], tail)
        kind = "budget_exhausted" if res < before else "not_cauchy"
        return LimitVerdict(kind, None, res)
    last = rows[-1]
    limit = {descriptor_label(w): v for w, v in zip(window, last)}
    best = None
    for a in window:
        dev = max(abs(u - v) for u, v in zip(rho_row(a), last))
        if dev <= tol:
            gap = oracle(sequence[-1], a)
            if best is None or gap < best[1]:
                best = (a, gap)
    if best is not None and best[1] <= tol:
        return LimitVerdict("converged", limit, res, "interior", best[0], best[1])
    return LimitVerdict("converged", limit, res, "boundary",
                        None if best is None else best[0],
                        None if best is None else best[1])


def all_small_subsets(items: Sequence, k: int):
    for r in range(k + 1):
        yield from combinations(items, r)
