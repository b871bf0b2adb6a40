"""Certified grid search for Nash and EDT points, and the duality gap.

Grid certificates use the coefficient-sum Lipschitz constants: if every
block is gridded with denominator N, each profile lies within the block
covering radius of a grid profile, and the deviation incentive of an agent
moves by at most ``sum_b L_b r_b`` (own value) plus the same sum over the
blocks the agent does not control (best-deviation value).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import search
from .errors import fail
from .game import Game, positive_eps
from .report import CERTIFIED_NO_EXACT_EDT, CERTIFIED_NO_EXACT_NASH, SOLVED, UNCONVERGED, EquilibriumReport, game_provenance, jsonable
from .strategy import Profile, as_profile

DEFAULT_BB_TOL = 1e-7
DEFAULT_GRID_TOL = 1e-2


def _block_L(game: Game, owner: int, k: int) -> Fraction:
    return game.lipschitz.block_constant(owner, game.layout.blocks[k].vars)


def _agent_coef(game: Game, owner: int, own_blocks) -> Fraction:
    """``rho * N`` for one agent."""
    tot = Fraction(0)
    for k, b in enumerate(game.layout.blocks):
        c = _block_L(game, owner, k) * search.radius_coef(b.size)
        tot += c if k in own_blocks else 2 * c
    return tot


def certified_resolution(game: Game, eps, agents) -> int:
    eps = Fraction(eps)
    base = search.denominator_for(2 * game.lipschitz.l_inf, eps)
    honest = max((search.denominator_for(_agent_coef(game, i, set(ks)), eps) for i, ks in agents), default=1)
    return max(base, honest)


def _guard_product(sizes) -> None:
    total = math.prod(sizes)
    if total > search.MAX_GRID_CELLS:
        fail("DIMENSION_TOO_LARGE", f"product grid has {total} points")


def _agent_search(game: Game, eps, agents, concept: str, none_status: str) -> EquilibriumReport:
    eps = positive_eps(eps)
    lay = game.layout
    utils = game.utility_polynomials
    if not lay.blocks:
        prof = Profile(lay, [])
        return EquilibriumReport(concept, SOLVED, eps, prof, "no strategic choices", tuple(u.evaluate([]) for u in utils), {"gain": 0}, 0, game_provenance(game))
    N = certified_resolution(game, eps, agents)
    _guard_product([search.grid_count(b.size, N) for b in lay.blocks])
    numer = [search.simplex_grid(b.size, N) for b in lay.blocks]
    pts = [g / N for g in numer]
    axes = [list(b.vars) for b in lay.blocks]
    owners = sorted({i for i, _ in agents})
    T = {i: search.product_tensor(utils[i], axes, pts) for i in owners}
    worst = np.full(T[owners[0]].shape, -np.inf)
    for i, ks in agents:
        br = T[i].max(axis=tuple(ks), keepdims=True)
        np.maximum(worst, br - T[i], out=worst)
    flat = int(np.argmin(worst))
    best = float(worst.reshape(-1)[flat])
    idx = np.unravel_index(flat, worst.shape)
    vals = []
    for k, j in enumerate(idx):
        vals += search.to_fractions(numer[k][j], N)
    prof = Profile(lay, vals)
    bars = {f"agent{a}": float(_agent_coef(game, i, set(ks)) / N) for a, (i, ks) in enumerate(agents)}
    prov = game_provenance(game, grid_denominator=N, grid_points=int(worst.size), agent_bars=bars)
    values = tuple(u.evaluate(prof.values) for u in utils)
    if best <= eps:
        return EquilibriumReport(concept, SOLVED, eps, prof, "grid point with small grid-deviation gain", values, {"grid_gain": best}, int(worst.size), prov)
    return EquilibriumReport(concept, none_status, eps, prof, "every grid point has grid-deviation gain above eps", values, {"min_grid_gain": best}, int(worst.size), prov)


def grid_nash_search(game: Game, eps) -> EquilibriumReport:
    """Scan the certified product grid for an eps-Nash point.

    If no grid point qualifies, no exact Nash equilibrium exists.
    """
    agents = [(i, game.layout.player_blocks(i)) for i in range(game.num_players) if game.layout.player_blocks(i)]
    return _agent_search(game, eps, agents, "nash", CERTIFIED_NO_EXACT_NASH)


def grid_edt_search(game: Game, eps) -> EquilibriumReport:
    """Same as grid_nash_search with one agent per infoset."""
    agents = [(b.player, [k]) for k, b in enumerate(game.layout.blocks)]
    return _agent_search(game, eps, agents, "edt", CERTIFIED_NO_EXACT_EDT)


# per-player best responses


@dataclass
class NashGap:
    gains: tuple  # per player: witnessed best-deviation gain
    bars: tuple  # per player: certified extra the true gain may have
    witnesses: tuple  # per player: the best strategy found (flat player vars)
    methods: tuple

    def to_json(self) -> dict:
        return jsonable({"gains": self.gains, "bars": self.bars, "witnesses": self.witnesses, "methods": self.methods})


def _local_blocks(game: Game, player: int):
    """Per block of the player: (block id, local variable indices)."""
    out, pos = [], 0
    for k in game.layout.player_blocks(player):
        b = game.layout.blocks[k]
        out.append((k, list(range(pos, pos + b.size))))
        pos += b.size
    return out


def _vertex_rows(m: int, one, zero):
    return [[one if a == j else zero for a in range(m)] for j in range(m)]


def player_best_response(game: Game, player: int, profile, tol: float | None = None, grid_tol: float = DEFAULT_GRID_TOL):
    """(strategy, exact value, bar, method) for player's best deviation."""
    prof = as_profile(game.layout, profile)
    tol = DEFAULT_BB_TOL if tol is None else tol
    pvars = game.layout.player_vars(player)
    q = game.utility_polynomials[player].restrict(pvars, prof.values)
    loc = _local_blocks(game, player)
    one, zero = (Fraction(1), Fraction(0)) if prof.exact else (1.0, 0.0)
    current = [prof.values[v] for v in pvars]
    best_x, best_v = current, q.evaluate(current)
    linear = [q.degree_in(lv) <= 1 for _, lv in loc]
    if all(linear):
        for combo in itertools.product(*[_vertex_rows(len(lv), one, zero) for _, lv in loc]):
            x = [c for row in combo for c in row]
            v = q.evaluate(x)
            if v > best_v:
                best_x, best_v = x, v
        return best_x, best_v, 0.0, "pure"
    if len(loc) == 1:
        res = search.maximize_on_simplex(q, tol, seeds=[[float(c) for c in current]])
        cands = _vertex_rows(q.nvars, one, zero) + [search.rationalize(res.point) if prof.exact else [float(c) for c in res.point]]
        for x in cands:
            v = q.evaluate(x)
            if v > best_v:
                best_x, best_v = x, v
        return best_x, best_v, max(0.0, res.upper - float(best_v)), "branch-and-bound"
    # several blocks with curvature: grid the curved ones, vertices elsewhere
    L = game.lipschitz
    coef = sum(L.block_constant(player, game.layout.blocks[k].vars) * search.radius_coef(len(lv)) for (k, lv), lin in zip(loc, linear) if not lin)
    N = search.denominator_for(coef, Fraction(grid_tol))
    pts, numer = [], []
    for (k, lv), lin in zip(loc, linear):
        g = search.vertices(len(lv)) if lin else search.simplex_grid(len(lv), N)
        numer.append((g, 1 if lin else N))
        pts.append(g / (1 if lin else N))
    _guard_product([len(p) for p in pts])
    T = search.product_tensor(q, [lv for _, lv in loc], pts)
    idx = np.unravel_index(int(np.argmax(T)), T.shape)
    x = []
    for (g, d), j in zip(numer, idx):
        x += search.to_fractions(g[j], d) if prof.exact else [float(c) / d for c in g[j]]
    v = q.evaluate(x)
    if v > best_v:
        best_x, best_v = x, v
    return best_x, best_v, max(0.0, float(T[idx]) + float(coef / N) - float(best_v)), "grid"


def nash_gap(game: Game, profile, tol: float | None = None, grid_tol: float = DEFAULT_GRID_TOL) -> NashGap:
    """Per-player exploitability: best deviation value minus current value."""
    prof = as_profile(game.layout, profile)
    gains, bars, wits, methods = [], [], [], []
    for i in range(game.num_players):
        now = game.utility_polynomials[i].evaluate(prof.values)
        if not game.layout.player_blocks(i):
            gains.append(now - now)
            bars.append(0.0)
            wits.append([])
            methods.append("none")
            continue
        x, v, bar, how = player_best_response(game, i, prof, tol, grid_tol)
        gains.append(v - now)
        bars.append(bar)
        wits.append(x)
        methods.append(how)
    return NashGap(tuple(gains), tuple(bars), tuple(wits), tuple(methods))


# max-min and min-max


@dataclass
class DualityReport:
    maxmin: float
    minmax: float
    maxmin_interval: tuple
    minmax_interval: tuple
    pi1: tuple  # P1's max-min strategy (flat P1 vars, exact)
    pi2: tuple  # P2's min-max strategy
    resolution: dict

    @property
    def gap(self) -> float:
        return self.minmax - self.maxmin

    @property
    def bar(self) -> float:
        """Largest half-width of the two value intervals."""
        return max(self.maxmin_interval[1] - self.maxmin, self.maxmin - self.maxmin_interval[0], self.minmax_interval[1] - self.minmax, self.minmax - self.minmax_interval[0])

    @property
    def gap_interval(self) -> tuple:
        return (self.minmax_interval[0] - self.maxmin_interval[1], self.minmax_interval[1] - self.maxmin_interval[0])

    def to_json(self) -> dict:
        return jsonable(
            {
                "maxmin": self.maxmin,
                "minmax": self.minmax,
                "gap": self.gap,
                "maxmin_interval": self.maxmin_interval,
                "minmax_interval": self.minmax_interval,
                "gap_interval": self.gap_interval,
                "bar": self.bar,
                "pi1": self.pi1,
                "pi2": self.pi2,
                "resolution": self.resolution,
            }
        )


def _player_axes(game: Game, player: int, N: int | None, target: Fraction, force_grid: bool):
    """Point sets per block of ``player`` plus the certified bar."""
    lay = game.layout
    u = game.utility_polynomials[0]
    blocks = lay.player_blocks(player)
    lin = [(not force_grid) and u.degree_in(lay.blocks[k].vars) <= 1 for k in blocks]
    coef = sum(_block_L(game, 0, k) * search.radius_coef(lay.blocks[k].size) for k, li in zip(blocks, lin) if not li)
    if N is None:
        N = search.denominator_for(coef, target) if coef else 1
    axes, denoms = [], []
    for k, li in zip(blocks, lin):
        m = lay.blocks[k].size
        axes.append(search.vertices(m) if li else search.simplex_grid(m, N))
        denoms.append(1 if li else N)
    return blocks, axes, denoms, float(coef / N), N


def _nested(game: Game, outer: int, resolution, target: Fraction):
    inner = 1 - outer
    ob, oax, oden, obar, oN = _player_axes(game, outer, resolution, target, force_grid=True)
    ib, iax, iden, ibar, iN = _player_axes(game, inner, resolution, target, force_grid=False)
    lay = game.layout
    blocks = ob + ib
    pts = [a / d for a, d in zip(oax + iax, oden + iden)]
    _guard_product([len(p) for p in pts])
    u = game.utility_polynomials[0]
    if blocks:
        T = search.product_tensor(u, [list(lay.blocks[k].vars) for k in blocks], pts)
    else:
        T = np.array(float(u.evaluate([])))
    inner_axes = tuple(range(len(ob), len(blocks)))
    if outer == 0:
        f = T.min(axis=inner_axes) if inner_axes else T
        flat = int(np.argmax(f)) if f.ndim else 0
    else:
        f = T.max(axis=inner_axes) if inner_axes else T
        flat = int(np.argmin(f)) if f.ndim else 0
    est = float(f.reshape(-1)[flat])
    pi = []
    if ob:
        idx = np.unravel_index(flat, f.shape)
        for a, d, j in zip(oax, oden, idx):
            pi += search.to_fractions(a[j], d)
    return est, obar, ibar, tuple(pi), {"outer": oN, "inner": iN if ib else 0}


def maxmin_minmax(game: Game, resolution: int | None = None, target_bar=Fraction(1, 100)) -> DualityReport:
    """Max-min and min-max values of player 1's utility by nested grids."""
    if game.num_players != 2 or not game.is_zero_sum():
        fail("NOT_ZERO_SUM", "maxmin_minmax needs a two-player zero-sum game")
    target = Fraction(target_bar)
    lo_est, lo_ob, lo_ib, pi1, res1 = _nested(game, 0, resolution, target)
    hi_est, hi_ob, hi_ib, pi2, res2 = _nested(game, 1, resolution, target)
    return DualityReport(
        lo_est,
        hi_est,
        (lo_est - lo_ib, lo_est + lo_ob),
        (hi_est - hi_ob, hi_est + hi_ib),
        pi1,
        pi2,
        {"maxmin": res1, "minmax": res2},
    )


def duality_profile(game: Game, report: DualityReport) -> Profile:
    vals = [None] * game.layout.size
    for player, pi in ((0, report.pi1), (1, report.pi2)):
        for v, x in zip(game.layout.player_vars(player), pi):
            vals[v] = x
    return Profile(game.layout, vals)


def gap_to_equilibrium(game: Game, report: DualityReport) -> EquilibriumReport:
    """(max-min strategy, min-max strategy) is a (gap + bars)-Nash profile."""
    from .verify import verify_nash

    prof = duality_profile(game, report)
    eps = max(0.0, report.gap) + 4 * report.bar
    chk = verify_nash(game, prof, eps)
    values = tuple(u.evaluate(prof.values) for u in game.utility_polynomials)
    prov = game_provenance(game, resolution=report.resolution)
    status = SOLVED if chk.passed else UNCONVERGED
    return EquilibriumReport("nash", status, eps, prof, "duality-gap profile", values, {"nash_gap": chk.residual}, 0, prov, {"duality": report.to_json(), "verify_nash": chk.to_json()})
