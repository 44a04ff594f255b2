"""Arens-Eells (Kantorovich-Rubinstein) norm of a molecule.

The primal value is an optimal transport cost, solved by successive shortest
augmenting paths on the bipartite supply/demand graph. The dual value is a
maximum of ``pair(f, m)`` over 1-Lipschitz ``f`` vanishing at the base,
solved as a separate linear program (HiGHS in float mode, an exact rational
simplex in exact mode) so the two numbers certify each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.optimize import linprog

from . import numeric
from .lip0 import LipFunction, mcshane_extend, zero_function
from .metric_space import PointedMetricSpace
from .molecule import Molecule, chi, from_pairs, pair

DEFAULT_TOL = 1e-9
_FLOAT_EPS = 1e-13


class SolverError(RuntimeError):
    pass


class CertificationError(RuntimeError):
    """Primal and dual values disagree beyond tolerance."""

    def __init__(self, message: str, certificate: "NormCertificate"):
        super().__init__(message)
        self.certificate = certificate


@dataclass(frozen=True)
class TransportPlan:
    space: PointedMetricSpace
    terms: tuple[tuple, ...]  # (amount, source index, target index)

    @property
    def cost(self):
        d = self.space.dist
        return sum((c * d[x][y] for c, x, y in self.terms), self.space.zero())

    def molecule(self) -> Molecule:
        return from_pairs(self.space, self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def to_json(self) -> list:
        pts = self.space.points
        return [[numeric.to_json(c), pts[x], pts[y]] for c, x, y in self.terms]


@dataclass(frozen=True)
class NormCertificate:
    primal_value: object
    dual_value: object
    plan: TransportPlan
    witness: LipFunction
    gap: object = field(default=None)

    def to_json(self) -> dict:
        return {
            "primal": numeric.to_json(self.primal_value),
            "dual": numeric.to_json(self.dual_value),
            "gap": numeric.to_json(self.gap),
            "plan": self.plan.to_json(),
            "witness": self.witness.to_json()["values"],
        }


def _check_inputs(space: PointedMetricSpace, m: Molecule) -> None:
    if m.space is not space and m.space != space:
        raise ValueError("molecule lives on a different space")
    space.require_valid()


# ---------------------------------------------------------------------------
# primal: successive shortest paths


def _ssp(cost, supply, demand, eps):
    """Min-cost transport from ``supply`` to ``demand`` over a dense cost matrix.

    Nodes: 0 = super source, 1..a sources, a+1..a+b sinks, a+b+1 = super sink.
    Dijkstra runs on reduced costs, so every arc in the residual graph has a
    nonnegative reduced cost throughout.
    """
    a, b = len(supply), len(demand)
    V = a + b + 2
    s, t = 0, V - 1
    zero = supply[0] * 0
    flow = [[zero] * b for _ in range(a)]
    rem_s = list(supply)
    rem_t = list(demand)
    pot = [zero] * V
    total = sum(supply, zero)
    for _ in range(4 * (a + 1) * (b + 1) + 16):
        if sum(rem_s, zero) <= eps * total:
            break
        dist = [None] * V
        prev = [-1] * V
        done = [False] * V
        dist[s] = zero
        while True:
            u = -1
            for v in range(V):
                if not done[v] and dist[v] is not None and (u < 0 or dist[v] < dist[u]):
                    u = v
            if u < 0:
                break
            done[u] = True
            du = dist[u]
            arcs = []
            if u == s:
                arcs = [(1 + i, zero) for i in range(a) if rem_s[i] > eps * total]
            elif u <= a:
                i = u - 1
                arcs = [(1 + a + j, cost[i][j]) for j in range(b)]
            elif u < t:
                j = u - 1 - a
                arcs = [(1 + i, -cost[i][j]) for i in range(a) if flow[i][j] > eps * total]
                if rem_t[j] > eps * total:
                    arcs.append((t, zero))
            for v, c in arcs:
                if done[v]:
                    continue
                rc = c + pot[u] - pot[v]
                if rc < 0:
                    rc = zero  # float drift only; exact mode keeps rc >= 0
                nd = du + rc
                if dist[v] is None or nd < dist[v]:
                    dist[v] = nd
                    prev[v] = u
        if dist[t] is None:
            raise SolverError("no augmenting path although supply remains")
        reach = max(x for x in dist if x is not None)
        for v in range(V):
            pot[v] += dist[v] if dist[v] is not None else reach
        path = [t]
        while path[-1] != s:
            path.append(prev[path[-1]])
        path.reverse()
        delta = min(rem_s[path[1] - 1], rem_t[path[-2] - 1 - a])
        for u, v in zip(path[1:-2], path[2:-1]):
            if u > a:  # sink -> source: backward arc
                delta = min(delta, flow[v - 1][u - 1 - a])
        rem_s[path[1] - 1] -= delta
        rem_t[path[-2] - 1 - a] -= delta
        for u, v in zip(path[1:-2], path[2:-1]):
            if u <= a:
                flow[u - 1][v - 1 - a] += delta
            else:
                flow[v - 1][u - 1 - a] -= delta
    else:
        raise SolverError("successive shortest paths did not terminate")
    return flow


def _forest(flow, cost, eps):
    """Cancel zero-cost cycles so that the support of ``flow`` is a forest."""
    a = len(flow)
    b = len(flow[0]) if a else 0
    while True:
        parent = list(range(a + b))
        adj: dict[int, list[int]] = {v: [] for v in range(a + b)}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v
        cycle = None
        for i in range(a):
            for j in range(b):
                if flow[i][j] <= eps:
                    continue
                u, v = i, a + j
                ru, rv = find(u), find(v)
                if ru != rv:
                    parent[ru] = rv
                    adj[u].append(v)
                    adj[v].append(u)
                    continue
                # path v -> u in the current forest closes a cycle with (u, v)
                back = {v: None}
                stack = [v]
                while stack:
                    x = stack.pop()
                    for y in adj[x]:
                        if y not in back:
                            back[y] = x
                            stack.append(y)
                nodes = [u]
                while nodes[-1] != v:
                    nodes.append(back[nodes[-1]])
                cycle = nodes  # u, ..., v; closing edge (u, v)
                break
            if cycle is not None:
                break
        if cycle is None:
            return flow
        # walk u -> ... -> v -> u; arcs source->sink gain, sink->source lose
        steps = list(zip(cycle, cycle[1:])) + [(cycle[-1], cycle[0])]
        plus, minus = [], []
        for x, y in steps:
            if x < a:
                plus.append((x, y - a))
            else:
                minus.append((y, x - a))
        delta_cost = sum(cost[i][j] for i, j in plus) - sum(cost[i][j] for i, j in minus)
        if delta_cost > 0:
            plus, minus = minus, plus
        delta = min(flow[i][j] for i, j in minus)
        for i, j in plus:
            flow[i][j] += delta
        for i, j in minus:
            flow[i][j] -= delta
            if flow[i][j] <= eps:
                flow[i][j] = flow[i][j] * 0


def norm_primal(space: PointedMetricSpace, m: Molecule):
    """Optimal transport cost of ``m`` and a plan attaining it.

    The plan terms are sorted by (source index, target index) and form a
    forest, so there are at most ``|support(m)| - 1`` of them.
    """
    _check_inputs(space, m)
    src = [i for i, c in m.coeffs.items() if c > 0]
    dst = [i for i, c in m.coeffs.items() if c < 0]
    if not src:
        return space.zero(), TransportPlan(space, ())
    supply = [m.coeffs[i] for i in src]
    demand = [-m.coeffs[j] for j in dst]
    cost = [[space.dist[i][j] for j in dst] for i in src]
    eps = 0 if space.exact else _FLOAT_EPS
    flow = _ssp(cost, supply, demand, eps)
    total = sum(supply, space.zero())
    flow = _forest(flow, cost, eps * total)
    terms = sorted(
        (flow[a][b], src[a], dst[b])
        for a in range(len(src)) for b in range(len(dst))
        if flow[a][b] > eps * total
    )
    terms = tuple(sorted(terms, key=lambda t: (t[1], t[2])))
    plan = TransportPlan(space, terms)
    return plan.cost, plan


# ---------------------------------------------------------------------------
# dual: independent linear programs


def _exact_simplex(c, A, b, on_iterate: Callable | None = None):
    """Maximize ``c.x`` subject to ``A x <= b``, ``x >= 0`` with ``b >= 0``.

    Dense tableau over Fractions with Bland's rule. ``on_iterate`` receives
    each basic feasible point.
    """
    nv = len(c)
    nc = len(A)
    width = nv + nc
    rows = []
    for r in range(nc):
        if b[r] < 0:
            raise SolverError("origin is infeasible")
        row = list(A[r]) + [Fraction(0)] * nc + [b[r]]
        row[nv + r] = Fraction(1)
        rows.append(row)
    obj = [-cj for cj in c] + [Fraction(0)] * nc + [Fraction(0)]
    basis = [nv + r for r in range(nc)]

    def point():
        x = [Fraction(0)] * nv
        for r, j in enumerate(basis):
            if j < nv:
                x[j] = rows[r][-1]
        return x

    for _ in range(100000):
        if on_iterate is not None:
            on_iterate(point())
        enter = next((j for j in range(width) if obj[j] < 0), None)
        if enter is None:
            return point(), obj[-1]
        best = None
        for r in range(nc):
            a = rows[r][enter]
            if a > 0:
                ratio = rows[r][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[r] < basis[best[1]]):
                    best = (ratio, r)
        if best is None:
            raise SolverError("linear program is unbounded")
        r = best[1]
        prow = rows[r]
        piv = prow[enter]
        if piv != 1:
            prow = [v / piv for v in prow]
            rows[r] = prow
        nz = [k for k, v in enumerate(prow) if v != 0]
        for rr in range(nc):
            if rr == r:
                continue
            f = rows[rr][enter]
            if f != 0:
                row = rows[rr]
                for k in nz:
                    row[k] -= f * prow[k]
        f = obj[enter]
        for k in nz:
            obj[k] -= f * prow[k]
        basis[r] = enter
    raise SolverError("simplex iteration limit reached")


def _dual_exact(space: PointedMetricSpace, pts: list[int], coef: list, on_iterate=None):
    # shift g_x = f(x) + d(x, base) >= 0; the origin is the feasible f = -d(., base)
    d = space.dist
    o = space.base
    k = len(pts)
    A, b = [], []
    for p in range(k):
        x = pts[p]
        for q in range(k):
            if p == q:
                continue
            y = pts[q]
            row = [Fraction(0)] * k
            row[p] = Fraction(1)
            row[q] = Fraction(-1)
            A.append(row)
            b.append(d[x][y] + d[x][o] - d[y][o])
        row = [Fraction(0)] * k
        row[p] = Fraction(1)
        A.append(row)
        b.append(2 * d[x][o])
    shift = [d[x][o] for x in pts]

    hook = None
    if on_iterate is not None:
        def hook(g):
            on_iterate([g[p] - shift[p] for p in range(k)])
    g, _ = _exact_simplex(list(coef), A, b, hook)
    return [g[p] - shift[p] for p in range(k)]


_FEAS_SLACK = 1e-12


def _dual_highs(space: PointedMetricSpace, pts: list[int], coef: list):
    d = space.matrix
    o = space.base
    k = len(pts)
    rows, rhs = [], []
    for p in range(k):
        for q in range(k):
            if p != q:
                row = np.zeros(k)
                row[p], row[q] = 1.0, -1.0
                rows.append(row)
                rhs.append(d[pts[p], pts[q]])
    bounds = [(-d[x, o], d[x, o]) for x in pts]
    res = linprog(
        -np.asarray([float(c) for c in coef]),
        A_ub=np.array(rows) if rows else None,
        b_ub=np.array(rhs) if rhs else None,
        bounds=bounds,
        method="highs",
    )
    if res.status != 0:
        raise SolverError(f"dual LP failed: {res.message}")
    return [float(v) for v in res.x]


def norm_dual(space: PointedMetricSpace, m: Molecule, on_iterate: Callable | None = None):
    """``max pair(f, m)`` over 1-Lipschitz ``f`` with ``f(base) = 0``.

    The LP is posed on the support of ``m`` only; the optimal values are then
    extended to the whole space by the McShane formula, which keeps the
    Lipschitz constant at most 1. In float mode the LP solution is scaled
    back into the unit ball if solver tolerance pushed it outside. In exact
    mode ``on_iterate`` sees every intermediate feasible dual point.
    """
    _check_inputs(space, m)
    pts = [i for i in m.coeffs if i != space.base]
    if not pts:
        return space.zero(), zero_function(space)
    coef = [m.coeffs[i] for i in pts]
    if space.exact:
        vals = _dual_exact(space, pts, coef, on_iterate)
    else:
        vals = _dual_highs(space, pts, coef)
        sub = [space.base] + pts
        d = space.matrix
        full = [0.0] + vals
        # rescale only when feasibility is broken by more than rounding; a
        # ratio test would amplify rounding noise on near-coincident points
        lip = 1.0
        for p in range(len(sub)):
            for q in range(p + 1, len(sub)):
                dpq = d[sub[p], sub[q]]
                if abs(full[p] - full[q]) - dpq > _FEAS_SLACK:
                    lip = max(lip, abs(full[p] - full[q]) / dpq)
        if lip > 1:
            vals = [v / lip for v in vals]
    witness = mcshane_extend(space, [space.base] + pts, [space.zero()] + vals, 1,
                             tol=DEFAULT_TOL)
    return pair(witness, m), witness


def dual_excess(f: LipFunction) -> float:
    """``max(|f(x) - f(y)| - d(x, y))``: additive violation of 1-Lipschitz."""
    v = np.asarray([float(x) for x in f.values])
    return max(0.0, float(np.max(np.abs(v[:, None] - v[None, :]) - f.space.matrix)))


def norm(space: PointedMetricSpace, m: Molecule):
    return norm_primal(space, m)[0]


def certify(space: PointedMetricSpace, m: Molecule, tol: float = DEFAULT_TOL,
            debug: bool = False) -> NormCertificate:
    """Run both solvers and check that their values agree.

    Raises :class:`CertificationError` (carrying the certificate) when
    ``|primal - dual| > tol * max(1, primal)``. With ``debug`` in exact mode,
    every simplex iterate is checked against the final plan cost (weak
    duality).
    """
    primal, plan = norm_primal(space, m)
    hook = None
    if debug and space.exact:
        coef = {i: c for i, c in m.coeffs.items() if i != space.base}
        pts = list(coef)

        def hook(vals):
            value = sum(coef[x] * v for x, v in zip(pts, vals))
            if value > primal:
                raise SolverError(f"weak duality broken: dual iterate {value} > {primal}")
    dual, witness = norm_dual(space, m, on_iterate=hook)
    gap = primal - dual
    cert = NormCertificate(primal, dual, plan, witness, gap)
    scale = max(1.0, abs(float(primal)))
    if abs(float(gap)) > tol * scale:
        raise CertificationError(
            f"duality gap {float(gap):.3e} exceeds {tol:g} * {scale:g}", cert
        )
    excess = dual_excess(witness)
    if excess > tol * scale:
        raise CertificationError(f"witness exceeds the unit ball by {excess:.3e}", cert)
    return cert


@dataclass(frozen=True)
class EmbeddingReport:
    max_deviation: float
    failures: tuple[tuple[str, str, float], ...]
    pairs_checked: int

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "max_deviation": self.max_deviation,
            "pairs_checked": self.pairs_checked,
            "failures": [list(f) for f in self.failures],
        }


def check_isometric_embedding(space: PointedMetricSpace, tol: float = DEFAULT_TOL
                              ) -> EmbeddingReport:
    """Compare ``||chi(x) - chi(y)||`` with ``d(x, y)`` over all pairs."""
    space.require_valid()
    worst = 0.0
    failures = []
    count = 0
    for x in range(space.n):
        for y in range(x, space.n):
            value = norm(space, chi(space, x) - chi(space, y))
            dev = abs(float(value - space.dist[x][y]))
            worst = max(worst, dev)
            count += 1
            if dev > tol:
                failures.append((space.points[x], space.points[y], dev))
    return EmbeddingReport(worst, tuple(failures), count)
