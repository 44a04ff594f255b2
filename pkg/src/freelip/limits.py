"""Tail-Cauchy estimation of limits from finite sequences."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

DEFAULT_TAIL = 5
DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class TailEstimate:
    cauchy: bool
    value: object  # last element of the sequence
    residual: object  # largest pairwise sup-distance inside the tail


def _sup(u, v):
    if isinstance(u, (list, tuple)):
        return max((abs(a - b) for a, b in zip(u, v)), default=0)
    return abs(u - v)


def tail_residual(seq: Sequence, tail: int):
    window = list(seq[-tail:])
    worst = 0
    for i in range(len(window)):
        for j in range(i + 1, len(window)):
            worst = max(worst, _sup(window[i], window[j]))
    return worst


def tail_estimate(seq: Sequence, tol: float = DEFAULT_TOL, tail: int = DEFAULT_TAIL
                  ) -> TailEstimate:
    """Call the sequence convergent when its last ``tail`` terms are pairwise
    within ``tol``; the estimate of the limit is then the last term."""
    if tail < 1:
        raise ValueError("tail must be positive")
    if len(seq) < tail:
        raise ValueError(f"need at least {tail} terms, got {len(seq)}")
    res = tail_residual(seq, tail)
    return TailEstimate(res <= tol, seq[-1], res)
