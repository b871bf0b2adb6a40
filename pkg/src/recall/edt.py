"""Evidential (EDT) deviations and epsilon-best-response dynamics."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import search
from .errors import fail
from .game import Game, parse_rational, positive_eps
from .report import SOLVED, UNCONVERGED, EquilibriumReport, game_provenance
from .strategy import Profile, as_profile, check_distribution, uniform_profile

MAX_BRANCHING = 6


def edt_deviation_utility(game: Game, player: int, infoset, alpha: Sequence, profile):
    prof = as_profile(game.layout, profile)
    k = game.layout.block_id(player, infoset)
    b = game.layout.blocks[k]
    if len(alpha) != b.size:
        fail("BLOCK_DIM_MISMATCH", f"infoset {b.label} has {b.size} actions, got {len(alpha)}")
    check_distribution(list(alpha), b.label)
    return game.utility_polynomials[player].evaluate(prof.replace_block(k, alpha).values)


def block_polynomial(game: Game, k: int, profile) -> "search.Polynomial":
    """Owner's utility as a polynomial in block k's actions, others fixed."""
    b = game.layout.blocks[k]
    prof = as_profile(game.layout, profile)
    return game.utility_polynomials[b.player].restrict(list(b.vars), prof.values)


def infoset_tiebreak_order(game: Game) -> list[tuple[int, int]]:
    """(player, infoset index) pairs in ascending order."""
    return sorted((b.player, b.index) for b in game.layout.blocks)


@dataclass(frozen=True)
class BestResponse:
    block: int
    alpha: tuple  # exact distribution
    value: object  # exact value of playing alpha
    upper: float  # certified upper bound on the best deviation value
    grid: int  # denominator used (0 for branch and bound)

    @property
    def bar(self) -> float:
        return max(0.0, self.upper - float(self.value))


def _guard(b) -> None:
    if b.size > MAX_BRANCHING:
        fail("BRANCHING_TOO_LARGE", f"infoset {b.label} has {b.size} > {MAX_BRANCHING} actions")


def certified_best_response(game: Game, player: int, infoset, profile, eps_half) -> BestResponse:
    """Best grid deviation at one infoset, within ``eps_half`` of the optimum.

    The grid has spacing at most ``eps_half / (2 L_inf)`` and is refined
    further if the block's covering radius needs it.  Ties go to the lowest
    grid index.
    """
    if float(eps_half) <= 0:
        fail("NONPOSITIVE_EPS", "eps_half must be positive")
    prof = as_profile(game.layout, profile)
    k = game.layout.block_id(player, infoset)
    b = game.layout.blocks[k]
    _guard(b)
    eh = parse_rational(eps_half)
    lip = game.lipschitz
    Lb = lip.block_constant(player, b.vars)
    N = max(search.denominator_for(2 * lip.l_inf, eh), search.denominator_for(Lb * search.radius_coef(b.size), eh))
    q = block_polynomial(game, k, prof)
    grid = search.simplex_grid(b.size, N)
    vals = q.evaluate_many(grid / N)
    j = int(np.argmax(vals))
    alpha = tuple(search.to_fractions(grid[j], N)) if prof.exact else tuple(float(x) for x in grid[j] / N)
    value = q.evaluate(list(alpha))
    upper = float(vals[j]) + float(Lb * search.covering_radius(b.size, N)) + 1e-12 * (1 + float(q.abs_coef_sum()))
    return BestResponse(k, alpha, value, upper, N)


def block_best_deviation(game: Game, k: int, profile, tol: float) -> BestResponse:
    """Branch-and-bound best deviation at block k; the witness is exact."""
    prof = as_profile(game.layout, profile)
    b = game.layout.blocks[k]
    _guard(b)
    q = block_polynomial(game, k, prof)
    cur = list(prof.block(k))
    res = search.maximize_on_simplex(q, tol, seeds=[[float(x) for x in cur]])
    one, zero = (Fraction(1), Fraction(0)) if prof.exact else (1.0, 0.0)
    cands = [cur] + [[one if i == a else zero for i in range(b.size)] for a in range(b.size)]
    if not res.exact_vertex:
        cands.append(search.rationalize(res.point) if prof.exact else [float(x) for x in res.point])
    best_a, best_v = cands[0], q.evaluate(cands[0])
    for c in cands[1:]:
        v = q.evaluate(c)
        if v > best_v:
            best_a, best_v = c, v
    # vertices are exact maximizers of linear (or one-action) blocks
    upper = float(best_v) if res.exact_vertex else max(res.upper, float(best_v))
    return BestResponse(k, tuple(best_a), best_v, upper, 0)


def edt_dynamics(game: Game, eps, max_rounds: int = 1000, start=None) -> EquilibriumReport:
    """Move to the first infoset deviation improving by at least eps/2.

    Each round scans infosets in ascending (player, infoset) order and takes
    the first improving certified best response.  A round without a move
    ends the run; the result then passes the eps-EDT check.
    """
    eps = positive_eps(eps)
    lay = game.layout
    prof = uniform_profile(lay) if start is None else as_profile(lay, start)
    if not prof.exact:
        prof = Profile(lay, [Fraction(x).limit_denominator(1 << 30) for x in prof.values])
    order = [lay.block_id(p, j) for p, j in infoset_tiebreak_order(game)]
    eps_half = eps / 4
    strategic = [i for i in range(game.num_players) if lay.player_blocks(i)]
    single = len(strategic) <= 1
    steps = []
    rounds = 0
    converged = False
    utils = game.utility_polynomials
    while rounds < max_rounds:
        moved = False
        for k in order:
            b = lay.blocks[k]
            br = certified_best_response(game, b.player, b.index, prof, eps_half)
            now = utils[b.player].evaluate(prof.values)
            if now <= br.value - eps / 2:
                new = prof.replace_block(k, br.alpha)
                after = utils[b.player].evaluate(new.values)
                assert after - now >= eps / 2
                steps.append({"player": b.player + 1, "infoset": b.label, "gain": after - now})
                prof = new
                moved = True
                break
        rounds += 1
        if not moved:
            converged = True
            break
    if single and strategic:
        lo, hi = game.payoff_range(strategic[0])
        assert len(steps) <= (hi - lo) / (eps / 2)
    prov = game_provenance(game, eps_half=eps_half, max_rounds=max_rounds)
    values = tuple(u.evaluate(prof.values) for u in utils)
    extras = {"steps": steps, "mode": "single-player" if single else "multi-player"}
    if converged:
        from .verify import verify_edt

        chk = verify_edt(game, prof, eps)
        extras["verify_edt"] = chk.to_json()
        return EquilibriumReport("edt", SOLVED, eps, prof, "no eps/2-improving infoset deviation", values, {"edt": chk.residual}, rounds, prov, extras)
    return EquilibriumReport("edt", UNCONVERGED, eps, prof, "round limit reached", values, {}, rounds, prov, extras)
