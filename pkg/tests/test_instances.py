from fractions import Fraction as F

import pytest

from recall import cdt, instances, nash
from recall.edt import edt_dynamics
from recall.errors import RecallError
from recall.game import degree_of_absentmindedness, has_perfect_recall, validate
from recall.report import CERTIFIED_NO_EXACT_EDT, CERTIFIED_NO_EXACT_NASH
from recall.strategy import Profile, pure_profile
from recall.verify import verify_cdt, verify_edt, verify_nash


def _vals(g, v):
    return Profile(g.layout, [F(x) for x in v])


def check_fact(g, fact, cache):
    c, v, tol = fact.concept, fact.value, fact.tolerance
    if c in ("maxmin", "minmax", "duality_gap"):
        if "duality" not in cache:
            cache["duality"] = nash.maxmin_minmax(g)
        rep = cache["duality"]
        got = {"maxmin": rep.maxmin, "minmax": rep.minmax, "duality_gap": rep.gap}[c]
        assert abs(got - float(v)) <= tol
    elif c == "no_exact_nash":
        assert nash.grid_nash_search(g, F(tol)).status == CERTIFIED_NO_EXACT_NASH
    elif c == "no_edt_equilibrium":
        assert nash.grid_edt_search(g, F(tol)).status == CERTIFIED_NO_EXACT_EDT
    elif c == "nodes":
        assert g.size == v
    elif c == "perfect_recall":
        assert bool(has_perfect_recall(g)) == v
    elif c == "zero_sum":
        assert g.is_zero_sum() == v
    elif c == "absentmindedness":
        assert degree_of_absentmindedness(g).maximum == v
    elif c == "optimum_value":
        rep = edt_dynamics(g, F(1, 1000))
        assert abs(rep.values[0] - v) <= max(tol, F(1, 1000))
    elif c == "optimum_profile":
        rep = edt_dynamics(g, F(1, 1000))
        assert max(abs(a - b) for a, b in zip(rep.profile.values, v)) <= F(1, 100)
    elif c == "cdt_equilibria":
        for prof in v:
            assert verify_cdt(g, _vals(g, prof), 0)
    elif c == "not_edt":
        assert not verify_edt(g, _vals(g, v), F(1, 10))
    elif c == "edt_equilibrium":
        prof, value = v
        p = _vals(g, prof)
        assert verify_edt(g, p, F(1, 10**6))
        assert g.utility_polynomials[0].evaluate(p.values) == value
    elif c == "cdt_utility_exit_vs_continue":
        cont = pure_profile(g.layout, [1])
        assert cdt.cdt_utility(g, 0, "I", [1, 0], cont) == v
    elif c == "value":
        if "duality" not in cache:
            cache["duality"] = nash.maxmin_minmax(g)
        assert abs(cache["duality"].maxmin - float(v)) <= 0.02
    elif c == "nash_profile":
        assert verify_nash(g, _vals(g, v), 0)
    else:
        raise AssertionError(f"unhandled fact {c}")


CASES = [(name, None) for name in instances.catalog_names()] + [("kicker", 1), ("kicker", 2), ("kicker", 4), ("coordination", 5)]


@pytest.mark.parametrize("name,lam", CASES)
def test_known_facts(name, lam):
    g = instances.build(name, lam=lam)
    assert validate(g.to_json()) == []
    facts = instances.known_facts(g)
    assert facts
    cache = {}
    for fact in facts:
        check_fact(g, fact, cache)


def test_facts_are_tagged():
    for g in instances.all_games():
        for f in instances.known_facts(g):
            assert f.basis in ("derived", "stated")


def test_dont_go_straight():
    g1 = instances.dont_go_straight(1)
    assert has_perfect_recall(g1)
    assert all(e.passed == c.passed for e, c in ((verify_edt(g1, p, F(1, 10)), verify_cdt(g1, p, F(1, 10))) for p in (_vals(g1, [0, 1]), _vals(g1, [1, 0]))))
    g5 = instances.dont_go_straight(5)
    assert cdt.cdt_utility(g5, 0, "I", [1, 0], pure_profile(g5.layout, [1])) == 5
    assert 5 <= 2 * g5.size * g5.max_abs_payoff
    with pytest.raises(RecallError):
        instances.dont_go_straight(0)


def test_shootout_structure(shootout):
    assert shootout.size == 15 and shootout.is_zero_sum()
    assert [b.label for b in shootout.layout.blocks] == ["I1", "I2", "J"]


def test_coordination_lambda_free():
    g = instances.coordination_game(10)
    assert g.num_players == 1
    assert max(g.nodes[t].payoffs[0] for t in g.terminals) == 10


def test_unknown_game():
    with pytest.raises(RecallError) as exc:
        instances.build("nope")
    assert exc.value.code == "UNKNOWN_GAME"


def test_meta_is_serializable(catalog):
    import json

    for g in catalog:
        json.dumps(g.to_json())
