from fractions import Fraction as F

import numpy as np
import pytest

from recall import cdt, instances
from recall.errors import RecallError
from recall.game import Game, expected_utility
from recall.report import SOLVED
from recall.strategy import Profile, random_profile, uniform_profile
from recall.verify import verify_cdt

HALF = [F(1, 2), F(1, 2)]


def P(game, vals):
    return Profile(game.layout, vals)


def test_cdt_utility_examples(driver):
    dgs = instances.dont_go_straight(5)
    cont = P(dgs, [0, 1])
    assert cdt.cdt_utility(dgs, 0, "I", [1, 0], cont) == 5
    mu = P(driver, HALF)
    assert cdt.cdt_utility(driver, 0, "I", [0, 1], mu) == F(3, 2)
    assert cdt.cdt_utility(driver, 0, "I", HALF, mu) == expected_utility(driver, 0, mu)
    with pytest.raises(RecallError) as exc:
        cdt.cdt_utility(driver, 0, "I", [1], mu)
    assert exc.value.code == "BLOCK_DIM_MISMATCH"


def test_gradient_two_ways_examples(driver):
    e, c = 0, 1
    pair = cdt.gradient_two_ways(driver, 0, P(driver, HALF))
    assert pair.symbolic[c] == pair.tree_walk[c] == 3
    pair = cdt.gradient_two_ways(driver, 0, P(driver, [1, 0]))
    assert pair.symbolic[e] == pair.tree_walk[e] == 0
    one = Game.from_json({"players": 1, "root": {"decision": {"player": 1, "infoset": "I", "actions": ["a", "b"], "children": {"a": {"terminal": {"payoffs": ["2"]}}, "b": {"terminal": {"payoffs": ["-1"]}}}}}})
    g = cdt.gradient_two_ways(one, 0, uniform_profile(one.layout))
    assert g.agree() and g.symbolic[0] - g.symbolic[1] == 3


def test_advantage_examples(driver):
    adv = cdt.advantage(driver, P(driver, HALF))
    assert adv[(0, 0, 0)] == F(-3, 4) and adv[(0, 0, 1)] == F(3, 4)
    adv = cdt.advantage(driver, P(driver, [1, 0]))
    assert adv[(0, 0, 0)] == 0 and adv[(0, 0, 1)] == 0


def test_nonpositive_advantages_pass_at_zero(catalog, rng):
    for g in catalog:
        for _ in range(20):
            prof = random_profile(g.layout, rng)
            if max(cdt.advantage(g, prof).values(), default=0) <= 0:
                assert verify_cdt(g, prof, 0)


def test_brouwer_examples(driver):
    assert cdt.brouwer_map(driver, P(driver, HALF)).values == (F(2, 7), F(5, 7))
    assert cdt.brouwer_map(driver, P(driver, [1, 0])).values == (1, 0)
    third = P(driver, [F(1, 3), F(2, 3)])
    assert cdt.brouwer_map(driver, third).values == third.values


def test_bound_params(driver):
    bp = cdt.bound_params(driver)
    assert bp.theta == 126 and bp.nodes == 7
    assert bp.lipschitz_F == 6468
    zero = Game.from_json({"players": 1, "root": {"decision": {"player": 1, "infoset": "I", "actions": ["a", "b"], "children": {"a": {"terminal": {"payoffs": ["0"]}}, "b": {"terminal": {"payoffs": ["0"]}}}}}})
    assert cdt.bound_params(zero).theta == 1


def test_fixed_point_driver():
    driver = instances.absentminded_driver()
    rep = cdt.solve_cdt_fixed_point(driver, F(1, 1000))
    assert rep.status == SOLVED
    e, c = rep.profile.values
    assert abs(c - 2 / 3) < 1e-3
    assert verify_cdt(driver, rep.profile, F(1, 1000))


def test_fixed_point_trivial_game():
    g = Game.from_json({"players": 1, "root": {"terminal": {"payoffs": ["1"]}}})
    rep = cdt.solve_cdt_fixed_point(g, F(1, 10))
    assert rep.status == SOLVED and rep.profile.values == () and rep.iterations == 0


def test_fixed_point_shootout(shootout):
    rep = cdt.solve_cdt_fixed_point(shootout, F(1, 100))
    assert verify_cdt(shootout, rep.profile, F(1, 100))


def test_fixed_point_cap_reports_unconverged():
    kicker = instances.absentminded_kicker(3)
    rep = cdt.solve_cdt_fixed_point(kicker, F(1, 100), max_iter=50)
    assert rep.status == "UNCONVERGED" and rep.iterations == 50
    assert rep.residuals["fixed_point"] > 0


def test_eps_prime_formula(driver):
    eps_fp, bp = cdt.fixed_point_target(driver, 1e-2)
    assert eps_fp == pytest.approx((1e-2 / (2 * 126 * 7**1.5)) ** 2, rel=1e-12)
    assert cdt.eps_prime(driver, eps_fp) == pytest.approx(1e-2, rel=1e-9)
    assert cdt.fixed_point_target(driver, 1e6)[0] == 0.24


def test_nonpositive_eps(driver):
    with pytest.raises(RecallError) as exc:
        cdt.solve_cdt_fixed_point(driver, 0)
    assert exc.value.code == "NONPOSITIVE_EPS"


def test_pgd_examples(driver, coordination):
    rep = cdt.solve_cdt_pgd_single_player(driver, 1e-4)
    assert rep.status == SOLVED and abs(rep.profile.values[1] - 2 / 3) <= 1e-4
    rep = cdt.solve_cdt_pgd_single_player(driver, 1e-4, start=[1, 0])
    assert rep.status == SOLVED and rep.profile.values == (1.0, 0.0)
    rep = cdt.solve_cdt_pgd_single_player(coordination, 1e-4)
    assert sorted(set(rep.profile.values)) == [0.0, 1.0]
    assert verify_cdt(coordination, rep.profile, 1e-4)


def test_pgd_needs_single_player(shootout):
    with pytest.raises(RecallError) as exc:
        cdt.solve_cdt_pgd_single_player(shootout, 1e-2)
    assert exc.value.code == "DIMENSION_TOO_LARGE"


def test_linearity(catalog, rng):
    for g in catalog:
        for _ in range(10):
            prof = random_profile(g.layout, rng)
            for b in g.layout.blocks:
                alpha = random_profile(g.layout, rng).values[b.offset:b.offset + b.size]
                pure = [cdt.cdt_utility(g, b.player, b.label, [int(j == a) for j in range(b.size)], prof) for a in range(b.size)]
                assert cdt.cdt_utility(g, b.player, b.label, alpha, prof) == sum(x * u for x, u in zip(alpha, pure))


def test_brouwer_blocks_sum_to_one(catalog, rng):
    for g in catalog:
        for _ in range(20):
            out = cdt.brouwer_map(g, random_profile(g.layout, rng))
            for k in range(len(g.layout.blocks)):
                assert sum(out.block(k)) == 1


def test_brouwer_lipschitz(catalog, rng):
    for g in catalog:
        LF = float(cdt.bound_params(g).lipschitz_F)
        for _ in range(1000 // len(catalog) + 1):
            a = random_profile(g.layout, rng, exact=False)
            b = random_profile(g.layout, rng, exact=False)
            fa, fb = cdt.brouwer_map(g, a).array(), cdt.brouwer_map(g, b).array()
            assert np.abs(fa - fb).max() <= LF * np.abs(a.array() - b.array()).max() + 1e-12


def test_gradient_agreement_catalog(catalog, rng):
    for g in catalog:
        for _ in range(50):
            prof = random_profile(g.layout, rng)
            for i in range(g.num_players):
                assert cdt.gradient_two_ways(g, i, prof).agree()


def test_gradient_finite_differences(catalog, rng):
    h = 1e-6
    for g in catalog:
        p = g.utility_polynomials
        for _ in range(10):
            x = random_profile(g.layout, rng, exact=False).array()
            for i in range(g.num_players):
                sym = cdt.utility_gradient(g, i, x.tolist())
                for v in range(len(x)):
                    up, dn = x.copy(), x.copy()
                    up[v] += h
                    dn[v] -= h
                    fd = (p[i].evaluate(up.tolist()) - p[i].evaluate(dn.tolist())) / (2 * h)
                    assert abs(fd - sym[v]) < 1e-6 * (1 + abs(sym[v]))


def test_cdt_utility_bound(catalog, rng):
    for g in catalog:
        bound = 2 * g.size * g.max_abs_payoff
        for _ in range(1000 // len(catalog) + 1):
            prof = random_profile(g.layout, rng)
            b = g.layout.blocks[int(rng.integers(0, len(g.layout.blocks)))]
            alpha = random_profile(g.layout, rng).values[b.offset:b.offset + b.size]
            assert abs(cdt.cdt_utility(g, b.player, b.label, alpha, prof)) <= bound
