from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from freelip.lip0 import LipFunction
from freelip.metric_space import random_metric
from freelip.molecule import (Molecule, MoleculeError, SpaceMismatchError, add, chi,
                              combination, from_json, from_pairs, pair, random_molecule,
                              scale, zero)


def test_chi(line):
    assert chi(line, 2).coeffs == {2: 1.0, 0: -1.0}
    assert chi(line, "0").is_zero
    assert (chi(line, 1) + chi(line, 2)).coeffs == {0: -2.0, 1: 1.0, 2: 1.0}
    with pytest.raises(KeyError):
        chi(line, "nope")


def test_from_pairs_and_cancellation(line_exact):
    s = line_exact
    assert from_pairs(s, [(2, "1", "2")]).coeffs == {1: 2, 2: -2}
    assert from_pairs(s, [(1, "1", "2"), (1, "2", "1")]).is_zero
    m = chi(s, 1) + 3 * chi(s, 2)
    assert add(m, scale(-1, m)) == zero(s)
    with pytest.raises(KeyError):
        from_pairs(s, [(1, "1", "9")])


def test_sum_zero_enforced(line, line_exact):
    with pytest.raises(MoleculeError):
        Molecule(line_exact, {0: 1, 1: 1})
    with pytest.raises(MoleculeError):
        Molecule(line, {0: 1.0, 1: -0.999})
    assert Molecule(line, {0: 1.0, 1: -1.0 + 1e-16})


def test_zero_coefficients_dropped(line_exact):
    m = Molecule(line_exact, {0: 0, 1: 1, 2: -1})
    assert m.support == (1, 2)


def test_pair_examples(line):
    f = LipFunction(line, [0, 1, 2])
    assert pair(f, chi(line, 2)) == 2.0
    assert pair(f, zero(line)) == 0
    # m = 1 + 2 - 2*0 evaluated on f(x) = x: 1 + 2 = 3
    assert pair(f, Molecule(line, {1: 1, 2: 1, 0: -2})) == 3.0


def test_pair_space_mismatch(line):
    other = random_metric(3, seed=1)
    with pytest.raises(SpaceMismatchError):
        pair(LipFunction(other, [0, 1, 1]), chi(line, 1))


def test_json_forms(line_exact):
    a = from_json(line_exact, {"coeffs": {"1": 1, "2": 1, "0": -2}})
    b = from_json(line_exact, {"pairs": [[1, "1", "0"], [1, "2", "0"]]})
    assert a == b
    with pytest.raises(MoleculeError):
        from_json(line_exact, {"nothing": 1})


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10**6), a=st.floats(-5, 5), b=st.floats(-5, 5))
def test_pair_bilinear(seed, a, b):
    rng = np.random.default_rng(seed)
    sp = random_metric(6, seed=seed)
    f = LipFunction(sp, [0.0 if i == sp.base else v for i, v in enumerate(rng.normal(size=6))])
    m1, m2 = random_molecule(sp, rng), random_molecule(sp, rng)
    lhs = pair(f, add(scale(a, m1), scale(b, m2)))
    assert lhs == pytest.approx(a * pair(f, m1) + b * pair(f, m2), abs=1e-10)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_decompositions_give_same_coefficients(seed):
    rng = np.random.default_rng(seed)
    sp = random_metric(5, seed=seed, mode="exact")
    m = random_molecule(sp, rng)
    # decomposition 1: through the base
    d1 = [(c, x, sp.base) for x, c in m.coeffs.items() if x != sp.base]
    # decomposition 2: a random detour through an intermediate point
    d2 = []
    for c, x, y in d1:
        z = int(rng.integers(sp.n))
        d2 += [(c, x, z), (c, z, y)]
    assert from_pairs(sp, d1).coeffs == from_pairs(sp, d2).coeffs == m.coeffs


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_chi_family_linearly_independent(seed):
    rng = np.random.default_rng(seed)
    sp = random_metric(6, seed=seed, mode="exact")
    scalars = {x: Fraction(int(rng.integers(-2, 3))) for x in range(sp.n) if x != sp.base}
    m = combination(sp, scalars)
    assert m.is_zero == all(v == 0 for v in scalars.values())
