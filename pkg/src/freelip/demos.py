"""Packaged scenarios for ``freelip demo``. Each returns ``(report, ok)``."""

from __future__ import annotations

import numpy as np

from .compactify import embed_image, horolimit, rho, separation_check
from .dynamics import CoefficientMatrix, double_limit_test
from .group_action import action_from_generators, check_representation, validate_action
from .metric_space import PointedMetricSpace, adjoin_equidistant, line_space
from .molecule import chi
from .oracles import half_line
from .transport_norm import certify


def rho_line(seed: int = 0):
    space = line_space(3, "exact")
    img = embed_image(space)
    funcs = {space.points[a]: [str(v) for v in rho(space, a).values] for a in range(space.n)}
    lips = {space.points[a]: str(rho(space, a).lip) for a in range(space.n)}
    ok = img.ok and all(lips[p] == "1" for p in ("1", "2")) and lips["0"] == "0"
    return {"rho": funcs, "lip": lips, "embedding": img.to_json()}, ok


def norm_line(seed: int = 0):
    space = line_space(3, "exact")
    cert = certify(space, chi(space, 1) + chi(space, 2), debug=True)
    return cert.to_json(), cert.gap == 0 and cert.primal_value == 3


def busemann_halfline(seed: int = 0):
    verdict = horolimit(half_line(), list(range(1, 51)), list(range(11)), tol=1e-8, tail=5)
    ok = (verdict.kind == "converged" and verdict.classification == "boundary"
          and all(v == -int(k) for k, v in verdict.limit.items()))
    return verdict.to_json(), ok


def gromov_equidistant(seed: int = 0):
    pair_space = PointedMetricSpace(["a", "b"], [[0, 2], [2, 0]], 0, "exact")
    space = adjoin_equidistant(pair_space, 1)
    rep = separation_check(space, ["b"], "a")
    doc = {"space": space.to_json(), "separation": rep.to_json()}
    return doc, rep.ok and rep.margin == 2


def equivariance_z2(seed: int = 0):
    space = PointedMetricSpace(["0", "a", "b"], [[0, 1, 1], [1, 0, 2], [1, 2, 0]], 0, "exact")
    action = action_from_generators(space, {"s": [0, 2, 1]})
    valid = validate_action(space, action)
    rep = check_representation(action, [rho(space, a) for a in range(space.n)])
    doc = {"action": valid.to_json(), "representation": rep.to_json(),
           "group_order": len(action.group)}
    return doc, valid.ok and rep.ok


def double_limit_violation(seed: int = 0):
    n = 20
    A = np.array([[1.0 if i < j else 0.0 for j in range(n)] for i in range(n)])
    verdict = double_limit_test(CoefficientMatrix(A, {"pattern": "i<j"}), tol=1e-8, tail=5)
    return verdict.to_json(), verdict.kind == "violation" and verdict.gap == 1.0


REGISTRY = {
    "rho-line": rho_line,
    "norm-line": norm_line,
    "busemann-halfline": busemann_halfline,
    "gromov-equidistant": gromov_equidistant,
    "equivariance-z2": equivariance_z2,
    "double-limit-violation": double_limit_violation,
}


def run(name: str, seed: int = 0):
    try:
        fn = REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown demo {name!r}; available: {', '.join(sorted(REGISTRY))}") from None
    return fn(seed)
