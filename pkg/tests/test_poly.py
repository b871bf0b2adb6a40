from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from recall.game import Game
from recall.errors import RecallError
from recall.poly import Polynomial, add, evaluate, game_lipschitz, lipschitz_inf, multiply, partial_derivative, scale

E, C = 0, 1
DRIVER = Polynomial(2, {((E, 1), (C, 2)): 6})


def poly(terms, n=2):
    return Polynomial(n, terms)


def test_evaluate_examples():
    assert evaluate(DRIVER, [F(1, 3), F(2, 3)]) == F(8, 9)
    assert evaluate(poly({((0, 1), (1, 1)): 1}), [1, 1]) == 1
    assert evaluate(Polynomial.zero(3), [F(1, 7), 2, 3]) == 0
    with pytest.raises(RecallError) as exc:
        evaluate(DRIVER, [1])
    assert exc.value.code == "LENGTH_MISMATCH"


def test_partial_examples():
    assert partial_derivative(DRIVER, C) == poly({((E, 1), (C, 1)): 12})
    assert partial_derivative(DRIVER, E) == poly({((C, 2),): 6})
    assert partial_derivative(Polynomial.constant(2, 5), 0).is_zero()
    with pytest.raises(RecallError) as exc:
        partial_derivative(DRIVER, 7)
    assert exc.value.code == "VAR_OUT_OF_RANGE"


def test_lipschitz_examples():
    lip = lipschitz_inf(poly({((0, 1), (1, 1)): 1}))
    assert lip.per_variable == (1, 1) and lip.l_inf == 1
    lip = lipschitz_inf(DRIVER)
    assert lip.per_variable == (6, 12) and lip.l_inf == 12
    assert lipschitz_inf(Polynomial.constant(2, 9)).l_inf == 1


def test_game_lipschitz_examples(driver, shootout):
    assert game_lipschitz([DRIVER]).l_inf == 12
    assert driver.lipschitz.l_inf == 12
    single = Game.from_json({"players": 1, "root": {"terminal": {"payoffs": ["5"]}}})
    assert single.lipschitz.l_inf == 1
    assert shootout.lipschitz.l_inf <= 2 * 15**3


def test_ring_operations():
    x1 = Polynomial.variable(2, 0)
    x2 = Polynomial.variable(2, 1)
    assert multiply(x1, x2) == poly({((0, 1), (1, 1)): 1})
    assert add(DRIVER, scale(DRIVER, -1)).is_zero()
    assert (x1 + 1) ** 2 == poly({((0, 2),): 1, ((0, 1),): 2, (): 1})
    assert multiply(DRIVER, x1).degree == DRIVER.degree + 1
    with pytest.raises(RecallError) as exc:
        add(x1, Polynomial.variable(3, 0))
    assert exc.value.code == "LAYOUT_MISMATCH"


def test_no_zero_coefficients_stored():
    p = poly({((0, 1),): 1}) + poly({((0, 1),): -1, ((1, 1),): 2})
    assert list(p.terms) == [((1, 1),)]
    assert p.degree == 1


NV = 6


@st.composite
def polys(draw, nvars=NV, max_terms=6, max_deg=4):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        deg = draw(st.integers(0, max_deg))
        mono = {}
        for _ in range(deg):
            v = draw(st.integers(0, nvars - 1))
            mono[v] = mono.get(v, 0) + 1
        terms[tuple(sorted(mono.items()))] = draw(st.fractions(-5, 5, max_denominator=7))
    return Polynomial(nvars, terms)


cube = st.lists(st.fractions(0, 1, max_denominator=20), min_size=NV, max_size=NV)


@given(polys(), cube, cube)
def test_lipschitz_bound_l1(p, a, b):
    # coefficient-sum constants pair with the l1 distance on the cube
    lip = lipschitz_inf(p)
    assert abs(p.evaluate(a) - p.evaluate(b)) <= sum(L * abs(x - y) for L, x, y in zip(lip.per_variable, a, b))
    assert abs(p.evaluate(a) - p.evaluate(b)) <= lip.l_inf * sum(abs(x - y) for x, y in zip(a, b))


def test_linf_statement_needs_l1_pairing():
    # x1 + x2 has L_inf = 1 but moves by 2 under an l_inf step of 1
    p = poly({((0, 1),): 1, ((1, 1),): 1})
    assert lipschitz_inf(p).l_inf == 1
    assert p.evaluate([1, 1]) - p.evaluate([0, 0]) == 2


def test_lipschitz_random_trials():
    rng = np.random.default_rng(7)
    p = Polynomial(3, {((0, 2), (1, 1)): 3, ((2, 3),): -2, ((0, 1),): F(1, 2)})
    lip = lipschitz_inf(p)
    a = rng.random((10_000, 3))
    b = rng.random((10_000, 3))
    diff = np.abs(p.evaluate_many(a) - p.evaluate_many(b))
    assert np.all(diff <= float(lip.l_inf) * np.abs(a - b).sum(axis=1) + 1e-12)


@given(polys(), st.lists(st.floats(0.05, 0.95), min_size=NV, max_size=NV), st.integers(0, NV - 1))
def test_partial_matches_finite_differences(p, x, v):
    h = 1e-5
    up, dn = list(x), list(x)
    up[v] += h
    dn[v] -= h
    fd = (float(p.evaluate(up)) - float(p.evaluate(dn))) / (2 * h)
    sym = float(p.partial(v).evaluate(x))
    assert abs(sym - fd) <= 1e-6 * (1 + abs(sym))


@given(polys(), polys(), cube, st.fractions(-3, 3, max_denominator=5))
def test_exact_round_trips(p, q, x, s):
    assert ((p + q) - q) == p
    assert ((p + q) - q).evaluate(x) == p.evaluate(x)
    assert (p * q).evaluate(x) == p.evaluate(x) * q.evaluate(x)
    if s:
        assert p.scale(s).scale(1 / s) == p


@given(polys())
def test_json_round_trip(p):
    names = [f"v{j}" for j in range(NV)]
    assert Polynomial.from_json(p.to_json(names), NV, names) == p
