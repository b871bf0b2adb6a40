from fractions import Fraction as F

import pytest

from oracles import matrix_value
from recall import instances, nash
from recall.errors import RecallError
from recall.game import Game
from recall.report import CERTIFIED_NO_EXACT_NASH, SOLVED
from recall.strategy import Profile, random_profile
from recall.verify import verify_nash

ZERO_SUM = ["shootout", "kicker", "matching-pennies", "mini-poker"]


def const_game(a, b):
    return Game.from_json({"players": 2, "root": {"terminal": {"payoffs": [str(a), str(b)]}}})


def test_shootout_has_no_quarter_nash(shootout):
    rep = nash.grid_nash_search(shootout, F(1, 4))
    assert rep.status == CERTIFIED_NO_EXACT_NASH
    assert rep.residuals["min_grid_gain"] > F(1, 4)


def test_kicker_grid_nash():
    g = instances.absentminded_kicker(3)
    rep = nash.grid_nash_search(g, F(1, 10))
    assert rep.status == SOLVED
    # P1 kicks left; P2 is indifferent once both kicks go left
    assert rep.profile.values[:2] == (1, 0)
    assert verify_nash(g, rep.profile, F(1, 10))


def test_trivial_game_nash():
    rep = nash.grid_nash_search(const_game(1, -1), F(1, 10))
    assert rep.status == SOLVED and rep.profile.values == ()


def test_dimension_guard():
    acts = [f"a{k}" for k in range(6)]
    doc = {
        "players": 2,
        "infosets": [{"player": 1, "label": f"I{j}", "actions": acts} for j in range(3)] + [{"player": 2, "label": "J", "actions": acts}],
        "root": {"terminal": {"payoffs": ["0", "0"]}},
    }

    def chain(j):
        if j == 4:
            return {"terminal": {"payoffs": ["1", "-1"]}}
        lab, p = (f"I{j}", 1) if j < 3 else ("J", 2)
        return {"decision": {"player": p, "infoset": lab, "actions": acts, "children": {a: chain(j + 1) for a in acts}}}

    doc["root"] = chain(0)
    with pytest.raises(RecallError) as exc:
        nash.grid_nash_search(Game.from_json(doc), F(1, 100))
    assert exc.value.code == "DIMENSION_TOO_LARGE"


def test_shootout_duality(shootout):
    rep = nash.maxmin_minmax(shootout)
    assert -0.02 <= rep.maxmin <= 0.02 and 0.98 <= rep.minmax <= 1.02
    assert 0.96 <= rep.gap <= 1.04 and rep.bar <= 0.02


def test_kicker_duality():
    rep = nash.maxmin_minmax(instances.absentminded_kicker(3))
    assert rep.maxmin == pytest.approx(3, abs=0.02) and rep.minmax == pytest.approx(3, abs=0.02)
    assert abs(rep.gap) <= 2 * rep.bar


def test_constant_duality():
    rep = nash.maxmin_minmax(const_game(5, -5))
    assert rep.maxmin == rep.minmax == 5


def test_not_zero_sum(coordination):
    with pytest.raises(RecallError) as exc:
        nash.maxmin_minmax(coordination)
    assert exc.value.code == "NOT_ZERO_SUM"
    with pytest.raises(RecallError):
        nash.maxmin_minmax(const_game(1, 1))


def test_gap_to_equilibrium():
    g = instances.absentminded_kicker(3)
    rep = nash.maxmin_minmax(g)
    eq = nash.gap_to_equilibrium(g, rep)
    assert eq.status == SOLVED and eq.eps <= 0.05
    assert eq.profile.values[:2] == (1, 0)
    sh = instances.forgetful_shootout()
    rep = nash.maxmin_minmax(sh)
    eq = nash.gap_to_equilibrium(sh, rep)
    assert verify_nash(sh, eq.profile, rep.gap + 4 * rep.bar)
    assert not verify_nash(sh, eq.profile, F(9, 10))
    c = const_game(2, -2)
    eq = nash.gap_to_equilibrium(c, nash.maxmin_minmax(c))
    assert eq.status == SOLVED and eq.eps == 0


def test_nash_gap_examples(shootout):
    k3 = instances.absentminded_kicker(3)
    assert nash.nash_gap(k3, Profile(k3.layout, [1, 0, 0, 1])).gains == (0, 0)
    k2 = instances.absentminded_kicker(2)
    assert nash.nash_gap(k2, Profile(k2.layout, [1, 0, 0, 1])).gains[1] == 1
    gap = nash.nash_gap(shootout, Profile(shootout.layout, [F(1, 2)] * 6))
    assert gap.gains[0] == 1


@pytest.mark.parametrize("name", ZERO_SUM)
def test_duality_gap_nonnegative(name):
    rep = nash.maxmin_minmax(instances.build(name))
    assert rep.gap >= -2 * rep.bar


@pytest.mark.parametrize("name", ZERO_SUM)
def test_prop7_forward(name):
    g = instances.build(name)
    rep = nash.maxmin_minmax(g)
    eq = nash.gap_to_equilibrium(g, rep)
    gap = nash.nash_gap(g, eq.profile)
    assert max(gap.gains) <= rep.gap + 4 * rep.bar + max(gap.bars)


@pytest.mark.parametrize("name", ZERO_SUM)
def test_prop7_backward(name, rng):
    g = instances.build(name)
    rep = nash.maxmin_minmax(g)
    profiles = [random_profile(g.layout, rng) for _ in range(10)]
    found = nash.grid_nash_search(g, F(1, 4))
    if found.profile is not None:
        profiles.append(found.profile)
    for prof in profiles:
        gap = nash.nash_gap(g, prof)
        eps = max(gap.gains)
        assert rep.gap <= 2 * eps + 2 * rep.bar + 2 * max(gap.bars)


def test_matrix_game_value():
    A = [[3, -1], [-2, 4]]
    g = instances.matrix_game(A)
    eps = F(1, 10)
    rep = nash.grid_nash_search(g, eps)
    assert rep.status == SOLVED
    assert abs(rep.values[0] - matrix_value(A)) <= 2 * eps
