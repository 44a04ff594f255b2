"""Finite groups acting by base-fixing isometries, and the induced actions
on molecules and on Lip0 functions."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .lip0 import LipFunction, in_dual_ball
from .metric_space import PointedMetricSpace, ValidationReport, Violation
from .molecule import Molecule

MAX_GROUP_ORDER = 10_000
EXHAUSTIVE_LIMIT = 200


class GroupError(ValueError):
    pass


def compose_perm(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    """``(p o q)[x] = p[q[x]]``: apply q first."""
    return tuple(p[x] for x in q)


def invert_perm(p: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(p)
    for x, y in enumerate(p):
        out[y] = x
    return tuple(out)


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """Group given by a multiplication table over ``elements``."""

    elements: tuple[str, ...]
    mult: tuple[tuple[int, ...], ...]
    identity: int = field(init=False)
    inverse: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(str(e) for e in self.elements))
        object.__setattr__(self, "mult", tuple(tuple(int(v) for v in r) for r in self.mult))
        n = len(self.elements)
        if n == 0:
            raise GroupError("group must be nonempty")
        if len(set(self.elements)) != n:
            raise GroupError("element ids must be unique")
        if len(self.mult) != n or any(len(r) != n for r in self.mult):
            raise GroupError(f"multiplication table must be {n}x{n}")
        if any(not 0 <= v < n for r in self.mult for v in r):
            raise GroupError("multiplication table entries out of range")
        ident = next((e for e in range(n)
                      if all(self.mult[e][g] == g == self.mult[g][e] for g in range(n))), None)
        if ident is None:
            raise GroupError("no identity element in the table")
        inv = []
        for g in range(n):
            h = next((h for h in range(n) if self.mult[g][h] == ident == self.mult[h][g]), None)
            if h is None:
                raise GroupError(f"element {self.elements[g]!r} has no inverse")
            inv.append(h)
        object.__setattr__(self, "identity", ident)
        object.__setattr__(self, "inverse", tuple(inv))

    def __len__(self) -> int:
        return len(self.elements)

    def index(self, g) -> int:
        if isinstance(g, int) and not isinstance(g, bool):
            if 0 <= g < len(self.elements):
                return g
            raise KeyError(f"group element index {g} out of range")
        try:
            return self.elements.index(str(g))
        except ValueError:
            raise KeyError(f"unknown group element {g!r}") from None

    def mul(self, g, h) -> int:
        return self.mult[self.index(g)][self.index(h)]

    def inv(self, g) -> int:
        return self.inverse[self.index(g)]

    def word(self, word: Sequence) -> int:
        out = self.identity
        for w in word:
            out = self.mult[out][self.index(w)]
        return out

    def check_associativity(self, limit: int = EXHAUSTIVE_LIMIT, seed: int = 0) -> list:
        import random
        n = len(self)
        m = self.mult
        if n <= limit:
            triples = ((a, b, c) for a in range(n) for b in range(n) for c in range(n))
        else:
            rnd = random.Random(seed)
            triples = ((rnd.randrange(n), rnd.randrange(n), rnd.randrange(n))
                       for _ in range(200_000))
        return [(a, b, c) for a, b, c in triples if m[m[a][b]][c] != m[a][m[b][c]]]


@dataclass(frozen=True, eq=False)
class IsometricAction:
    """A finite group acting on the points of a space by permutations."""

    space: PointedMetricSpace
    group: FiniteGroup
    perm: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        perms = tuple(tuple(int(v) for v in p) for p in self.perm)
        if len(perms) != len(self.group):
            raise GroupError("need one permutation per group element")
        for g, p in enumerate(perms):
            if sorted(p) != list(range(self.space.n)):
                raise GroupError(f"element {self.group.elements[g]!r} is not a permutation of the points")
        object.__setattr__(self, "perm", perms)

    @property
    def points(self) -> tuple[str, ...]:
        return self.space.points

    def apply(self, g, x) -> int:
        return self.perm[self.group.index(g)][self.space.index(x)]

    def to_json(self) -> dict:
        return {
            "elements": list(self.group.elements),
            "mult": [list(r) for r in self.group.mult],
            "perm": {e: list(p) for e, p in zip(self.group.elements, self.perm)},
        }


def validate_action(space: PointedMetricSpace, action: IsometricAction) -> ValidationReport:
    """Homomorphism, identity, isometry and base-fixing checks with witnesses."""
    out: list[Violation] = []
    G = action.group
    P = action.perm
    n = space.n
    names = G.elements
    if action.space != space:
        out.append(Violation("space", (), (), 0))
        return ValidationReport(tuple(out))
    for a, b, c in G.check_associativity():
        out.append(Violation("associativity", (a, b, c), (names[a], names[b], names[c]), 0))
    if P[G.identity] != tuple(range(n)):
        out.append(Violation("identity", (G.identity,), (names[G.identity],), 0))
    for g in range(len(G)):
        for h in range(len(G)):
            if P[G.mult[g][h]] != compose_perm(P[g], P[h]):
                out.append(Violation("homomorphism", (g, h), (names[g], names[h]), 0))
    d = space.dist
    for g in range(len(G)):
        p = P[g]
        if p[space.base] != space.base:
            out.append(Violation("base", (g,), (names[g],), 0))
        for x in range(n):
            for y in range(x + 1, n):
                if d[p[x]][p[y]] != d[x][y]:
                    out.append(Violation(
                        "isometry", (g, x, y), (names[g], space.points[x], space.points[y]),
                        d[p[x]][p[y]] - d[x][y]))
    return ValidationReport(tuple(out))


def group_from_permutations(generators: Mapping[str, Sequence[int]], n: int | None = None,
                           cap: int = MAX_GROUP_ORDER):
    """Close a set of permutations under composition (breadth-first).

    Returns ``(group, perms)``. Generators keep their own names; other
    elements are named by a shortest generator word joined with ``.``; the
    identity is ``e`` unless a generator already is the identity.
    """
    gens = {str(k): tuple(int(v) for v in p) for k, p in generators.items()}
    if n is None:
        n = len(next(iter(gens.values()))) if gens else 0
    ident = tuple(range(n))
    for k, p in gens.items():
        if sorted(p) != list(ident):
            raise GroupError(f"generator {k!r} is not a permutation of {n} points")
    names: dict[tuple, str] = {}
    names[ident] = next((k for k, p in gens.items() if p == ident), "e")
    order = [ident]
    queue = deque([ident])
    for k, p in gens.items():
        if p not in names:
            names[p] = k
            order.append(p)
            queue.append(p)
    while queue:
        cur = queue.popleft()
        for k, p in gens.items():
            nxt = compose_perm(p, cur)
            if nxt not in names:
                names[nxt] = f"{k}.{names[cur]}" if names[cur] != "e" else k
                order.append(nxt)
                queue.append(nxt)
                if len(order) > cap:
                    raise GroupError(f"group order exceeds cap {cap}")
    return _group_of(order, [names[p] for p in order])


def _group_of(perms: list[tuple[int, ...]], names: list[str]):
    pos = {p: i for i, p in enumerate(perms)}
    try:
        mult = [[pos[compose_perm(p, q)] for q in perms] for p in perms]
    except KeyError:
        raise GroupError("permutations are not closed under composition") from None
    return FiniteGroup(tuple(names), tuple(tuple(r) for r in mult)), tuple(perms)


def action_from_generators(space: PointedMetricSpace, generators: Mapping, cap=MAX_GROUP_ORDER
                           ) -> IsometricAction:
    gens = {k: [space.index(v) if isinstance(v, str) else int(v) for v in p]
            for k, p in generators.items()}
    group, perms = group_from_permutations(gens, space.n, cap)
    return IsometricAction(space, group, perms)


def trivial_action(space: PointedMetricSpace) -> IsometricAction:
    return IsometricAction(space, FiniteGroup(("e",), ((0,),)), (tuple(range(space.n)),))


def isometry_group(space: PointedMetricSpace, cap: int = MAX_GROUP_ORDER) -> IsometricAction:
    """All base-fixing isometries, found by backtracking.

    Candidates for the image of a point are restricted to points with the
    same sorted distance profile; every partial assignment is checked against
    the already placed points. Distances are compared exactly.
    """
    n = space.n
    d = space.dist
    profile = [tuple(sorted(row)) for row in d]
    cands = [[y for y in range(n) if profile[y] == profile[x]
              and d[y][space.base] == d[x][space.base]] for x in range(n)]
    order = sorted(range(n), key=lambda x: (len(cands[x]), x))
    found: list[tuple[int, ...]] = []
    img = [-1] * n
    used = [False] * n
    img[space.base] = space.base
    used[space.base] = True
    order = [x for x in order if x != space.base]
    placed = [space.base]

    def extend(k):
        if len(found) > cap:
            raise GroupError(f"isometry group exceeds cap {cap}")
        if k == len(order):
            found.append(tuple(img))
            return
        x = order[k]
        for y in cands[x]:
            if used[y]:
                continue
            if all(d[y][img[z]] == d[x][z] for z in placed):
                img[x] = y
                used[y] = True
                placed.append(x)
                extend(k + 1)
                placed.pop()
                used[y] = False
                img[x] = -1

    extend(0)
    found.sort()
    ident = tuple(range(n))
    found.remove(ident)
    found.insert(0, ident)
    group, perms = _group_of(found, [f"g{i}" for i in range(len(found))])
    return IsometricAction(space, group, perms)


def act_molecule(action: IsometricAction, g, m: Molecule) -> Molecule:
    """Push a molecule forward: ``(g.m)(g x) = m(x)``."""
    p = action.perm[action.group.index(g)]
    return Molecule(m.space, {p[x]: c for x, c in m.coeffs.items()}, check=False)


def dual_act(action: IsometricAction, g, f: LipFunction) -> LipFunction:
    """``(g f)(v) = f(g^{-1} v)``."""
    ginv = action.perm[action.group.inv(g)]
    return LipFunction(f.space, [f.values[ginv[v]] for v in range(f.space.n)])


@dataclass(frozen=True)
class GSet:
    """Finite set with a permutation per group element (same indexing as the group)."""

    labels: tuple[str, ...]
    perm: tuple[tuple[int, ...], ...]


def as_gset(action: IsometricAction) -> GSet:
    return GSet(action.space.points, action.perm)


@dataclass(frozen=True)
class RepresentationReport:
    equivariance: tuple[tuple[str, str, float], ...]
    dual_ball: tuple[tuple[str, float], ...]

    @property
    def ok(self) -> bool:
        return not self.equivariance and not self.dual_ball

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "equivariance_violations": [list(v) for v in self.equivariance],
            "dual_ball_violations": [list(v) for v in self.dual_ball],
        }


def check_representation(action: IsometricAction, alpha, xset: GSet | None = None,
                         tol: float = 0.0) -> RepresentationReport:
    """Check that ``alpha: X -> Lip0`` is equivariant and lands in the unit ball.

    ``alpha`` is a sequence indexed like ``xset`` or a callable on indices.
    ``xset`` defaults to the points of the space with the given action.
    """
    xset = xset or as_gset(action)
    get: Callable[[int], LipFunction] = alpha if callable(alpha) else alpha.__getitem__
    images = [get(i) for i in range(len(xset.labels))]
    eq_bad = []
    for g in range(len(action.group)):
        for i, f in enumerate(images):
            lhs = images[xset.perm[g][i]]
            rhs = dual_act(action, g, f)
            dev = max((abs(a - b) for a, b in zip(lhs.values, rhs.values)), default=0)
            if dev > tol:
                eq_bad.append((action.group.elements[g], xset.labels[i], float(dev)))
    ball_bad = [(xset.labels[i], float(f.lip)) for i, f in enumerate(images)
                if not in_dual_ball(f, tol)]
    return RepresentationReport(tuple(eq_bad), tuple(ball_bad))


def action_from_json(space: PointedMetricSpace, doc: Mapping) -> IsometricAction:
    """Read ``{"elements", "mult", "perm"}`` or ``{"generators"}`` documents.

    Permutations are lists of point indices or of point labels.
    """
    def perm_of(raw):
        if not isinstance(raw, (list, tuple)):
            raise GroupError(f"permutation must be a list, got {raw!r}")
        return [space.index(v) if isinstance(v, str) else int(v) for v in raw]

    if "generators" in doc:
        gens = doc["generators"]
        if not isinstance(gens, Mapping):
            raise GroupError('"generators" must map ids to permutations')
        return action_from_generators(space, {k: perm_of(v) for k, v in gens.items()})
    if not all(k in doc for k in ("elements", "mult", "perm")):
        raise GroupError('group document needs "generators" or "elements"/"mult"/"perm"')
    group = FiniteGroup(tuple(doc["elements"]), tuple(tuple(r) for r in doc["mult"]))
    perm_doc = doc["perm"]
    try:
        perms = tuple(tuple(perm_of(perm_doc[e])) for e in group.elements)
    except KeyError as exc:
        raise GroupError(f"missing permutation for element {exc}") from None
    return IsometricAction(space, group, perms)
