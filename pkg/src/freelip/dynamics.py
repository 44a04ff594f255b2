"""Matrix coefficients, orbit closures and double-limit probes.

Every verdict here is experimental evidence about finite sections of
iterated limits. Nothing in this module decides membership in WAP(G).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import numeric
from .group_action import GroupError, IsometricAction, dual_act
from .lip0 import LipFunction, pointwise_dist
from .limits import DEFAULT_TAIL, DEFAULT_TOL, tail_estimate
from .oracles import DistanceOracle

EVIDENCE_NOTE = "finite probe of iterated limits; evidence only, not a proof of (non-)membership"


def matrix_coefficient(action: IsometricAction, f: LipFunction, v, g):
    """``m_{f,v}(g) = f(g v)``."""
    return f.values[action.perm[action.group.index(g)][action.space.index(v)]]


@dataclass(frozen=True)
class OrbitClosure:
    functions: tuple[LipFunction, ...]
    elements: tuple[str, ...]  # a group element producing each function

    @property
    def size(self) -> int:
        return len(self.functions)

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "elements": list(self.elements),
            "functions": [[numeric.to_json(v) for v in f.values] for f in self.functions],
        }


def orbit_closure(action: IsometricAction, f: LipFunction, tol: float = 0.0) -> OrbitClosure:
    """The orbit ``{g f}`` with near-duplicates (sup distance <= tol) merged.

    For a finite group the orbit is already closed, so this is the whole
    compact G-space generated by ``f``.
    """
    funcs: list[LipFunction] = []
    names: list[str] = []
    for g in range(len(action.group)):
        h = dual_act(action, g, f)
        if all(pointwise_dist(h, k) > tol for k in funcs):
            funcs.append(h)
            names.append(action.group.elements[g])
    return OrbitClosure(tuple(funcs), tuple(names))


@dataclass(frozen=True)
class CoefficientMatrix:
    values: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 2:
            raise ValueError("coefficient matrix must be two-dimensional")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficient matrix has non-finite entries")
        object.__setattr__(self, "values", arr)

    @property
    def shape(self):
        return self.values.shape

    def transpose(self) -> "CoefficientMatrix":
        return CoefficientMatrix(self.values.T, {**self.provenance, "transposed": True})


@dataclass(frozen=True)
class DoubleLimitVerdict:
    kind: str  # consistent | violation | inconclusive
    lim_ij: float | None  # lim_i lim_j A[i][j]
    lim_ji: float | None  # lim_j lim_i A[i][j]
    gap: float | None
    row_residual: float | None = None
    col_residual: float | None = None
    failed: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "lim_ij": self.lim_ij,
            "lim_ji": self.lim_ji,
            "gap": self.gap,
            "row_residual": self.row_residual,
            "col_residual": self.col_residual,
            "failed_tails": list(self.failed),
            "note": EVIDENCE_NOTE,
        }


def _iterated(A: np.ndarray, tol: float, tail: int):
    """``lim_i lim_j A[i, j]`` on the finite section.

    The inner limit over ``j`` uses the last ``tail`` columns; the outer
    limit over ``i`` uses the ``tail`` rows just before the last ``tail``,
    so that every outer index is smaller than every inner one.
    """
    R, C = A.shape
    outer = range(R - 2 * tail, R - tail)
    inner_limits = []
    worst = 0.0
    for i in outer:
        est = tail_estimate(list(A[i, :]), tol, tail)
        worst = max(worst, float(est.residual))
        if not est.cauchy:
            return None, worst, f"inner tail of index {i}"
        inner_limits.append(float(est.value))
    est = tail_estimate(inner_limits, tol, tail)
    worst = max(worst, float(est.residual))
    if not est.cauchy:
        return None, worst, "outer tail"
    return float(est.value), worst, None


def double_limit_test(A: CoefficientMatrix, tol: float = DEFAULT_TOL,
                      tail: int = DEFAULT_TAIL) -> DoubleLimitVerdict:
    """Compare ``lim_i lim_j`` with ``lim_j lim_i`` on a finite matrix."""
    M = A.values if isinstance(A, CoefficientMatrix) else np.asarray(A, dtype=float)
    if tail < 1:
        raise ValueError("tail must be positive")
    R, C = M.shape
    if R < 2 * tail or C < 2 * tail:
        raise ValueError(f"matrix {R}x{C} too small for tail {tail}: need at least {2 * tail}x{2 * tail}")
    lij, rres, rfail = _iterated(M, tol, tail)
    lji, cres, cfail = _iterated(M.T, tol, tail)
    failed = tuple(f"{side}: {msg}" for side, msg in (("ij", rfail), ("ji", cfail)) if msg)
    if lij is None or lji is None:
        return DoubleLimitVerdict("inconclusive", lij, lji, None, rres, cres, failed)
    gap = abs(lij - lji)
    kind = "violation" if gap > tol else "consistent"
    return DoubleLimitVerdict(kind, lij, lji, gap, rres, cres)


def stability_probe(oracle: DistanceOracle, seq_a: Sequence, seq_b: Sequence,
                    tol: float = DEFAULT_TOL, tail: int = DEFAULT_TAIL) -> DoubleLimitVerdict:
    """Double-limit probe of ``A[i][j] = d(a_i, b_j)``."""
    if min(len(seq_a), len(seq_b)) < 2 * tail:
        raise ValueError(f"sequences need at least {2 * tail} terms")
    vals = [[float(oracle(a, b)) for b in seq_b] for a in seq_a]
    mat = CoefficientMatrix(np.array(vals), {"oracle": oracle.name})
    return double_limit_test(mat, tol, tail)


class WordAction:
    """Generators given as point maps; words act right to left.

    The word ``[w1, w2, ..., wk]`` is the product ``w1 w2 ... wk``, so it sends
    ``v`` to ``w1(w2(...wk(v)))``.
    """

    def __init__(self, generators: Mapping[str, Callable]):
        if not generators:
            raise GroupError("need at least one generator")
        self.generators = dict(generators)

    def apply(self, word: Sequence[str], v):
        for w in reversed(list(word)):
            try:
                gen = self.generators[w]
            except KeyError:
                raise GroupError(f"word uses unknown generator {w!r}") from None
            v = gen(v)
        return v

    @classmethod
    def from_action(cls, action: IsometricAction) -> "WordAction":
        gens = {}
        for g, name in enumerate(action.group.elements):
            p = action.perm[g]
            gens[name] = (lambda p: lambda x: p[x])(p)
        return cls(gens)


def parse_word(word) -> list[str]:
    if isinstance(word, str):
        return [w for w in word.split(".") if w and w != "e"]
    return [str(w) for w in word]


def coefficient_matrix(act: WordAction, f: Callable, v, seq_g: Sequence, seq_h: Sequence
                       ) -> CoefficientMatrix:
    """``A[i][j] = f(g_i h_j v)``."""
    gs = [parse_word(w) for w in seq_g]
    hs = [parse_word(w) for w in seq_h]
    vals = [[float(f(act.apply(g + h, v))) for h in hs] for g in gs]
    return CoefficientMatrix(np.array(vals), {"rows": len(gs), "cols": len(hs)})


def rho_on_oracle(oracle: DistanceOracle, a) -> Callable:
    da0 = oracle(a, oracle.base)
    if da0 == 0:
        return lambda x: 0
    return lambda x: oracle(a, x) - da0


def wap_probe(act, f, v, seq_g: Sequence, seq_h: Sequence, tol: float = DEFAULT_TOL,
              tail: int = DEFAULT_TAIL) -> DoubleLimitVerdict:
    """Double-limit probe of the matrix coefficient ``g -> f(g v)``.

    ``act`` is an :class:`IsometricAction` (then ``f`` is a LipFunction and
    ``v`` a point) or a :class:`WordAction` (then ``f`` is any callable on
    descriptors, e.g. :func:`rho_on_oracle`).
    """
    if isinstance(act, IsometricAction):
        space = act.space
        vi = space.index(v)
        fv = f.values if isinstance(f, LipFunction) else f
        act = WordAction.from_action(act)
        return wap_probe(act, lambda x: fv[x], vi, seq_g, seq_h, tol, tail)
    if min(len(seq_g), len(seq_h)) < 2 * tail:
        raise ValueError(f"sequences need at least {2 * tail} words")
    return double_limit_test(coefficient_matrix(act, f, v, seq_g, seq_h), tol, tail)
