import itertools
import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from freelip.io import load_space, write_space_csv
from freelip.metric_space import (
    EquidistantError, MetricStructureError, PointedMetricSpace, adjoin_equidistant,
    equidistant_constant, from_graph, from_points_in_plane, random_metric,
    shortest_path_closure, validate,
)
from freelip.oracles import OracleAsymmetryError, DistanceOracle, builtin


def brute_triangle_ok(dist):
    n = len(dist)
    return all(dist[i][k] <= dist[i][j] + dist[j][k]
               for i, j, k in itertools.product(range(n), repeat=3))


def test_line_validates(line):
    assert validate(line).ok


def test_negative_distance_reports_positivity():
    sp = PointedMetricSpace(["a", "b"], [[0, -1], [-1, 0]])
    rep = validate(sp)
    pos = [v for v in rep.violations if v.kind == "positivity"]
    assert pos and pos[0].labels == ("a", "b")


def test_triangle_violation_witness():
    sp = PointedMetricSpace(["a", "b", "c"], [[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    rep = validate(sp)
    assert rep.kinds() == {"triangle"}
    assert ("a", "b", "c") in [v.labels for v in rep.violations]


def test_asymmetry_and_diagonal_reported():
    sp = PointedMetricSpace(["a", "b"], [[0.5, 1], [2, 0]])
    assert validate(sp).kinds() == {"diagonal", "symmetry"}


def test_pseudometric_is_a_violation():
    sp = PointedMetricSpace(["a", "b", "c"], [[0, 0, 1], [0, 0, 1], [1, 1, 0]])
    assert "positivity" in validate(sp).kinds()


def test_non_square_is_structural():
    with pytest.raises(MetricStructureError):
        PointedMetricSpace(["a", "b"], [[0, 1], [1]])
    with pytest.raises(MetricStructureError):
        PointedMetricSpace(["a", "b"], [[0, 1], [1, 0], [2, 2]])
    with pytest.raises(MetricStructureError):
        PointedMetricSpace(["a", "b"], [[0, math.inf], [math.inf, 0]])


def test_tolerance_applies_in_float_mode():
    eps = 1e-11
    sp = PointedMetricSpace(["a", "b", "c"], [[0, 1, 2 + eps], [1, 0, 1], [2 + eps, 1, 0]])
    assert validate(sp, tol=1e-9).ok
    assert not validate(sp, tol=1e-12).ok


def test_exact_mode_has_no_slack():
    third = Fraction(1, 3)
    sp = PointedMetricSpace(["a", "b", "c"],
                            [[0, third, 2 * third], [third, 0, third], [2 * third, third, 0]],
                            0, "exact")
    assert validate(sp).ok
    bad = PointedMetricSpace(["a", "b", "c"],
                             [[0, third, "2/3" if False else Fraction(2, 3) + Fraction(1, 10**30)],
                              [third, 0, third],
                              [Fraction(2, 3) + Fraction(1, 10**30), third, 0]], 0, "exact")
    assert validate(bad).kinds() == {"triangle"}


# adjoin_equidistant

def test_adjoin_two_points_c0_one():
    sp = PointedMetricSpace(["a", "b"], [[0, 2], [2, 0]], 0, "exact")
    out = adjoin_equidistant(sp, 1)
    assert out.n == 3 and out.base == 2
    assert [out.dist[out.base][x] for x in range(2)] == [1, 1]
    assert brute_triangle_ok(out.dist)
    assert validate(out).ok
    assert out.diameter <= 2 * 1


def test_adjoin_too_small_c0_rejected():
    sp = PointedMetricSpace(["a", "b"], [[0, 2], [2, 0]])
    with pytest.raises(EquidistantError) as exc:
        adjoin_equidistant(sp, 0.5)
    assert exc.value.witness[0] == "a" and exc.value.witness[2] == "b"
    with pytest.raises(EquidistantError):
        adjoin_equidistant(sp, 0)
    with pytest.raises(EquidistantError):
        adjoin_equidistant(sp, -1)


def test_adjoin_single_point():
    sp = PointedMetricSpace(["a"], [[0]])
    out = adjoin_equidistant(sp, 1)
    assert out.n == 2 and out.d("a", out.base) == 1.0
    with pytest.raises(EquidistantError):
        adjoin_equidistant(sp)


def test_adjoin_default_is_half_diameter():
    sp = random_metric(6, seed=3)
    out = adjoin_equidistant(sp)
    assert equidistant_constant(out) == sp.diameter / 2
    assert validate(out).ok


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 8), seed=st.integers(0, 10**6), factor=st.floats(0.05, 3.0))
def test_adjoin_passes_iff_c0_at_least_half_diameter(n, seed, factor):
    sp = random_metric(n, seed=seed, mode="exact")
    diam = sp.diameter
    c0 = Fraction(factor).limit_denominator(1000) * max(diam, 1)
    if c0 <= 0:
        return
    if 2 * c0 >= diam:
        out = adjoin_equidistant(sp, c0)
        assert validate(out).ok
        assert brute_triangle_ok(out.dist)
    else:
        with pytest.raises(EquidistantError):
            adjoin_equidistant(sp, c0)
        # the matrix itself would fail validation
        dist = [list(r) + [c0] for r in sp.dist] + [[c0] * n + [0]]
        forced = PointedMetricSpace(list(sp.points) + ["o"], dist, n, "exact")
        assert "triangle" in validate(forced).kinds()


# generators

def test_path_graph_is_line(line):
    g = from_graph([(0, 1), (1, 2)])
    assert g.dist == line.dist


def test_graph_with_labels_and_weights():
    g = from_graph([("x", "y", 2), ("y", "z", 3), ("x", "z", 10)], labels=["x", "y", "z"])
    assert g.d("x", "z") == 5.0


def test_disconnected_graph_rejected():
    with pytest.raises(ValueError, match="disconnected"):
        from_graph([(0, 1)], n=3)


def test_random_metric_deterministic():
    a = random_metric(5, seed=7)
    b = random_metric(5, seed=7)
    assert a.dist == b.dist
    assert a.dist != random_metric(5, seed=8).dist


def test_points_in_plane():
    sp = from_points_in_plane([(0, 0), (3, 4)], p=2)
    assert sp.d(0, 1) == 5.0
    assert from_points_in_plane([(0, 0), (3, 4)], p=1).d(0, 1) == 7.0
    assert from_points_in_plane([(0, 0), (3, 4)], p=math.inf).d(0, 1) == 4.0
    assert from_points_in_plane([(0, 0), (3, 4)], p=1, mode="exact").d(0, 1) == 7


@pytest.mark.parametrize("mode,tol", [("exact", 0), ("float", 1e-12)])
def test_generators_validate(mode, tol):
    for seed in range(10):
        assert validate(random_metric(9, seed=seed, mode=mode), tol=tol).ok


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 9).flatmap(lambda n: st.lists(
    st.lists(st.floats(0.01, 100), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_closure_of_symmetric_matrix_is_metric(raw):
    n = len(raw)
    W = [[raw[min(i, j)][max(i, j)] for j in range(n)] for i in range(n)]
    D = shortest_path_closure(W)
    sp = PointedMetricSpace([str(i) for i in range(n)], D)
    assert validate(sp, tol=1e-9).ok


# file formats

def test_json_roundtrip_exact(tmp_path):
    sp = random_metric(5, seed=1, mode="exact").with_base("3")
    path = tmp_path / "s.json"
    path.write_text(json.dumps(sp.to_json()))
    back = load_space(path, "exact")
    assert back == sp
    assert all(isinstance(v, str) for row in sp.to_json()["dist"] for v in row)


def test_json_float_literals_load_exactly(tmp_path):
    path = tmp_path / "s.json"
    path.write_text('{"points": ["a", "b"], "base": "a", "dist": [[0, 0.1], [0.1, 0]]}')
    assert load_space(path, "exact").d("a", "b") == Fraction(1, 10)
    assert load_space(path, "float").d("a", "b") == 0.1


def test_csv_roundtrip(tmp_path):
    sp = random_metric(4, seed=2, mode="exact").with_base("2")
    path = tmp_path / "s.csv"
    write_space_csv(sp, path)
    back = load_space(path, "exact")
    assert back.base_label == "2"
    for x in sp.points:
        for y in sp.points:
            assert back.d(x, y) == sp.d(x, y)


# oracles

def test_oracle_detects_asymmetry():
    o = DistanceOracle(lambda a, b: abs(a - b) + (1 if a < b else 0), 0)
    with pytest.raises(OracleAsymmetryError):
        o(0, 3)


def test_oracle_detects_nonzero_diagonal():
    o = DistanceOracle(lambda a, b: 1, 0)
    with pytest.raises(OracleAsymmetryError):
        o(2, 2)


@pytest.mark.parametrize("name,a,b,expected", [
    ("half-line", 3, 10, 7),
    ("grid-l1", (1, 2), (4, -2), 7),
    ("grid-linf", (1, 2), (4, -2), 4),
    ("grid-l2", (0, 0), (3, 4), 5.0),
    ("tree-3", (0, 1, 0), (0, 2), 3),
    ("circle", 0.1, 0.9, 0.2),
])
def test_builtin_oracles(name, a, b, expected):
    o = builtin("builtin:" + name)
    assert o(a, b) == pytest.approx(expected)


def test_window_space_is_valid():
    o = builtin("tree-3")
    win = [o.parse(w) for w in ["", "0", "01", "1", "12", "2"]]
    sp = o.window_space(win)
    assert validate(sp).ok and sp.base_label == "[]"
