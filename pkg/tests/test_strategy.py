from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import compositions
from recall.errors import RecallError
from recall.strategy import (
    Profile,
    ProfileLayout,
    linf_distance,
    project_to_simplex_product,
    uniform_profile,
    with_infoset_action,
)


def test_uniform(driver, shootout):
    assert uniform_profile(driver.layout).values == (F(1, 2), F(1, 2))
    assert uniform_profile(shootout.layout).values == (F(1, 2),) * 6
    assert uniform_profile(ProfileLayout.build(1, [])).values == ()


def test_flat_indices_are_a_bijection(shootout):
    lay = shootout.layout
    seen = [lay.var(b.player, b.label, a) for b in lay.blocks for a in b.actions]
    assert sorted(seen) == list(range(lay.size))


def test_with_infoset_action(driver, shootout):
    p = with_infoset_action(uniform_profile(driver.layout), 0, "I", [1, 0])
    assert p.values == (1, 0)
    q = with_infoset_action(uniform_profile(shootout.layout), 0, "I2", [0, 1])
    assert q.values == (F(1, 2), F(1, 2), 0, 1, F(1, 2), F(1, 2))
    with pytest.raises(RecallError) as exc:
        with_infoset_action(uniform_profile(driver.layout), 0, "I", [0.6, 0.6])
    assert exc.value.code == "BLOCK_DIM_MISMATCH"


def test_projection_examples(driver):
    assert project_to_simplex_product([0.2, 0.2], driver.layout).values == pytest.approx((0.5, 0.5))
    assert project_to_simplex_product([2.0, 0.0], driver.layout).values == pytest.approx((1.0, 0.0))
    with pytest.raises(RecallError) as exc:
        project_to_simplex_product([1.0], driver.layout)
    assert exc.value.code == "LENGTH_MISMATCH"


def test_linf_distance(driver):
    lay = driver.layout
    assert linf_distance(Profile(lay, [1, 0]), Profile(lay, [1, 0])) == 0
    assert linf_distance(Profile(lay, [1, 0]), Profile(lay, [0, 1])) == 1
    assert linf_distance(Profile(lay, [F(1, 2), F(1, 2)]), Profile(lay, [F(1, 4), F(3, 4)])) == F(1, 4)


def test_invalid_profiles_rejected(driver):
    with pytest.raises(RecallError):
        Profile(driver.layout, [F(1, 2), F(1, 3)])
    with pytest.raises(RecallError):
        Profile(driver.layout, [-1, 2])


LAY3 = ProfileLayout.build(1, [(0, "A", ("x", "y", "z")), (0, "B", ("u", "v"))])


@given(arrays(np.float64, 5, elements=st.floats(-3, 3)))
def test_projection_is_idempotent_and_valid(v):
    p = project_to_simplex_product(v, LAY3)
    for k in range(2):
        assert abs(sum(p.block(k)) - 1) < 1e-12
        assert min(p.block(k)) >= 0
    q = project_to_simplex_product(p.values, LAY3)
    assert np.allclose(p.values, q.values, atol=1e-12)


GRID3 = np.array(list(compositions(3, 40)), dtype=float) / 40


@given(arrays(np.float64, 3, elements=st.floats(-2, 2)))
def test_projection_is_nearest_point(v):
    lay = ProfileLayout.build(1, [(0, "A", ("x", "y", "z"))])
    p = np.array(project_to_simplex_product(v, lay).values)
    d = np.sum((p - v) ** 2)
    assert d <= np.min(np.sum((GRID3 - v) ** 2, axis=1)) + 1e-12
