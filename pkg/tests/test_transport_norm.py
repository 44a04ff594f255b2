from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from freelip.lip0 import LipFunction
from freelip.metric_space import PointedMetricSpace, random_metric
from freelip.molecule import Molecule, MoleculeError, chi, from_pairs, pair, random_molecule, zero
from freelip.transport_norm import (CertificationError, SolverError, certify,
                                    check_isometric_embedding, norm, norm_dual, norm_primal)

from oracles_lp import brute_norm


def test_line_example(line_exact):
    s = line_exact
    m = chi(s, 1) + chi(s, 2)
    cert = certify(s, m, debug=True)
    assert cert.primal_value == 3 and cert.dual_value == 3 and cert.gap == 0
    assert cert.witness.values == (0, 1, 2)
    assert brute_norm(s.dist, m.coeffs) == pytest.approx(3)


def test_chi_difference_on_line(line):
    assert norm(line, chi(line, 2) - chi(line, 1)) == 1.0


def test_zero_molecule(line):
    cert = certify(line, zero(line))
    assert cert.primal_value == 0 and len(cert.plan) == 0


def test_plan_reproduces_molecule(line_exact):
    m = from_pairs(line_exact, [(2, "2", "0"), (1, "1", "2")])
    value, plan = norm_primal(line_exact, m)
    assert plan.molecule() == m and plan.cost == value
    assert all(c > 0 for c, _, _ in plan.terms)


def test_unbalanced_molecule_rejected(line_exact):
    with pytest.raises(MoleculeError):
        Molecule(line_exact, {1: 1})


def test_other_space_rejected(line):
    other = random_metric(3, seed=0)
    with pytest.raises(ValueError):
        norm(other, chi(line, 1))


def test_invalid_space_rejected():
    bad = PointedMetricSpace(["a", "b", "c"], [[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    with pytest.raises(ValueError):
        norm(bad, chi(bad, 2))


def test_near_degenerate_distances():
    eps = 1e-10
    sp = PointedMetricSpace(["0", "a", "b"], [[0, 1, 1 + eps], [1, 0, eps], [1 + eps, eps, 0]])
    m = chi(sp, 2) - chi(sp, 1)
    cert = certify(sp, m)
    assert cert.primal_value == pytest.approx(eps, abs=1e-15)


def test_certification_failure_raises(monkeypatch):
    import freelip.transport_norm as tn
    sp = random_metric(4, seed=0)
    m = chi(sp, 1)
    real = tn.norm_dual
    monkeypatch.setattr(tn, "norm_dual", lambda s, mm, on_iterate=None:
                        (real(s, mm)[0] * 0.5, real(s, mm)[1]))
    with pytest.raises(CertificationError) as exc:
        tn.certify(sp, m)
    assert exc.value.certificate.gap > 0


def test_debug_hook_catches_bad_iterate(monkeypatch):
    import freelip.transport_norm as tn
    sp = random_metric(4, seed=0, mode="exact")
    m = chi(sp, 1)
    real = tn.norm_dual

    def fake(s, mm, on_iterate=None):
        on_iterate([Fraction(10**6)] * len([x for x in mm.coeffs if x != s.base]))
        return real(s, mm)
    monkeypatch.setattr(tn, "norm_dual", fake)
    with pytest.raises(SolverError, match="weak duality"):
        tn.certify(sp, m, debug=True)


@pytest.mark.parametrize("seed", range(10))
def test_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    sp = random_metric(6, seed=seed)
    for _ in range(5):
        m = random_molecule(sp, rng, integer=True)
        assert norm(sp, m) == pytest.approx(brute_norm(sp.dist, m.coeffs), abs=1e-8)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_exact_gap_is_zero(seed):
    rng = np.random.default_rng(seed)
    sp = random_metric(int(rng.integers(2, 8)), seed=seed, mode="exact")
    m = random_molecule(sp, rng, integer=True)
    cert = certify(sp, m, debug=True)
    assert cert.gap == 0
    assert cert.witness.lip <= 1


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), a=st.floats(-4, 4))
def test_norm_axioms(seed, a):
    rng = np.random.default_rng(seed)
    sp = random_metric(7, seed=seed)
    m1, m2 = random_molecule(sp, rng), random_molecule(sp, rng)
    n1, n2 = norm(sp, m1), norm(sp, m2)
    assert norm(sp, m1 + m2) <= n1 + n2 + 1e-9
    assert norm(sp, a * m1) == pytest.approx(abs(a) * n1, rel=1e-9, abs=1e-9)
    assert (n1 > 1e-12) == (not m1.is_zero)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_norm_below_any_decomposition(seed):
    rng = np.random.default_rng(seed)
    sp = random_metric(7, seed=seed)
    terms = [(float(rng.normal()), int(rng.integers(7)), int(rng.integers(7))) for _ in range(6)]
    m = from_pairs(sp, terms)
    cost = sum(abs(c) * sp.dist[x][y] for c, x, y in terms)
    assert norm(sp, m) <= cost + 1e-9


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_dual_witness_is_feasible_and_tight(seed):
    rng = np.random.default_rng(seed)
    sp = random_metric(8, seed=seed)
    m = random_molecule(sp, rng)
    value, f = norm_dual(sp, m)
    assert f.lip <= 1 + 1e-9
    assert pair(f, m) == pytest.approx(value, abs=1e-9)


def test_isometric_embedding_report():
    rep = check_isometric_embedding(random_metric(6, seed=4))
    assert rep.ok and rep.pairs_checked == 21
