"""Causal (CDT) deviation utilities, the advantage map and CDT solvers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import fail
from .game import Game, node_reach, node_values, positive_eps
from .poly import Compiled
from .report import SOLVED, UNCONVERGED, EquilibriumReport, game_provenance
from .strategy import Profile, as_profile, check_distribution, project_to_simplex_product, uniform_profile

MIN_DAMPING = 1 / 1024


def utility_gradient(game: Game, player: int, profile) -> list:
    """Symbolic partials of player's utility in every variable at ``profile``."""
    prof = as_profile(game.layout, profile)
    return [g.evaluate(prof.values) for g in game.gradient_polynomials[player]]


def tree_gradient(game: Game, player: int, profile) -> list:
    """Partials via sum over h in I of Prob(h | mu) * U(mu | h a)."""
    prof = as_profile(game.layout, profile)
    exact = prof.exact
    reach = node_reach(game, prof.values, exact)
    vals = node_values(game, player, prof.values, exact)
    out = [Fraction(0) if exact else 0.0 for _ in range(game.layout.size)]
    for nd in game.nodes:
        if nd.kind != "decision":
            continue
        off = game.layout.blocks[nd.block].offset
        for k, c in enumerate(nd.children):
            out[off + k] += reach[nd.id] * vals[c]
    return out


@dataclass(frozen=True)
class GradientPair:
    symbolic: tuple
    tree_walk: tuple

    def agree(self) -> bool:
        return self.symbolic == self.tree_walk


def gradient_two_ways(game: Game, player: int, profile) -> GradientPair:
    return GradientPair(tuple(utility_gradient(game, player, profile)), tuple(tree_gradient(game, player, profile)))


def _utility(game: Game, player: int, prof: Profile):
    return game.utility_polynomials[player].evaluate(prof.values)


def cdt_utility(game: Game, player: int, infoset, alpha: Sequence, profile):
    """First-order value of deviating to ``alpha`` at one infoset."""
    prof = as_profile(game.layout, profile)
    k = game.layout.block_id(player, infoset)
    b = game.layout.blocks[k]
    if len(alpha) != b.size:
        fail("BLOCK_DIM_MISMATCH", f"infoset {b.label} has {b.size} actions, got {len(alpha)}")
    check_distribution(list(alpha), b.label)
    grads = [game.gradient_polynomials[player][v].evaluate(prof.values) for v in b.vars]
    mu = prof.block(k)
    u = _utility(game, player, prof)
    return u + sum((a - m) * g for a, m, g in zip(alpha, mu, grads))


def advantage(game: Game, profile) -> dict:
    """``g[(player, block, action)] = U_CDT(action) - U`` for every triple."""
    prof = as_profile(game.layout, profile)
    out = {}
    for i in range(game.num_players):
        grads = game.gradient_polynomials[i]
        for k in game.layout.player_blocks(i):
            b = game.layout.blocks[k]
            g = [grads[v].evaluate(prof.values) for v in b.vars]
            mean = sum(m * x for m, x in zip(prof.block(k), g))
            for a in range(b.size):
                out[(i, k, a)] = g[a] - mean
    return out


def brouwer_map(game: Game, profile) -> Profile:
    prof = as_profile(game.layout, profile)
    adv = advantage(game, prof)
    vals = list(prof.values)
    zero = Fraction(0) if prof.exact else 0.0
    for k, b in enumerate(game.layout.blocks):
        pos = [max(zero, adv[(b.player, k, a)]) for a in range(b.size)]
        denom = 1 + sum(pos)
        for a in range(b.size):
            vals[b.offset + a] = (prof.values[b.offset + a] + pos[a]) / denom
    return Profile(game.layout, vals, check=False)


@dataclass(frozen=True)
class CdtBoundParams:
    theta: Fraction
    lipschitz_F: Fraction
    nodes: int
    l_inf: Fraction


def bound_params(game: Game) -> CdtBoundParams:
    H = game.size
    theta = max(Fraction(1), 3 * H * game.max_abs_payoff)
    L = game.lipschitz.l_inf
    return CdtBoundParams(theta, 11 * H * H * L, H, L)


class _FastField:
    """Float evaluation of every player's own-variable gradient."""

    def __init__(self, game: Game):
        lay = game.layout
        self.n = lay.size
        polys = []
        for i in range(game.num_players):
            for v in lay.player_vars(i):
                polys.append(game.gradient_polynomials[i][v])
        order = [v for i in range(game.num_players) for v in lay.player_vars(i)]
        self.order = np.array(order, dtype=np.int64)
        self.comp = Compiled(polys, self.n) if polys else None
        self.blocks = np.array(lay.block_of_var(), dtype=np.int64)
        self.nblocks = len(lay.blocks)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros(self.n)
        if self.comp is not None:
            out[self.order] = self.comp(x)
        return out

    def block_sum(self, v: np.ndarray) -> np.ndarray:
        return np.bincount(self.blocks, weights=v, minlength=self.nblocks)

    def advantage(self, x: np.ndarray) -> np.ndarray:
        g = self.gradient(x)
        return g - self.block_sum(x * g)[self.blocks]

    def brouwer(self, x: np.ndarray) -> np.ndarray:
        pos = np.maximum(self.advantage(x), 0.0)
        return (x + pos) / (1.0 + self.block_sum(pos))[self.blocks]


def fixed_point_target(game: Game, eps) -> tuple[float, CdtBoundParams]:
    bp = bound_params(game)
    scale = 2 * float(bp.theta) * bp.nodes**1.5
    eps_fp = (float(eps) / scale) ** 2
    return min(eps_fp, 0.24), bp


def eps_prime(game: Game, residual: float) -> float:
    """CDT precision certified by a fixed-point residual."""
    bp = bound_params(game)
    return 2 * float(bp.theta) * bp.nodes**1.5 * math.sqrt(residual)


def solve_cdt_fixed_point(game: Game, eps, max_iter: int = 1_000_000, start=None) -> EquilibriumReport:
    """Iterate the advantage map until the fixed-point residual certifies eps.

    Steps are ``x + beta (F(x) - x)``; beta starts at 1 and halves whenever
    the residual grows.
    """
    eps = positive_eps(eps)
    eps_fp, bp = fixed_point_target(game, eps)
    prov = game_provenance(game, theta=bp.theta, L_F=bp.lipschitz_F, eps_fp=eps_fp)
    lay = game.layout
    if lay.size == 0:
        prof = Profile(lay, [])
        return EquilibriumReport("cdt", SOLVED, eps, prof, "fixed-point residual", tuple(u.evaluate([]) for u in game.utility_polynomials), {"fixed_point": 0.0}, 0, prov, {"eps_prime": 0.0})
    field = _FastField(game)
    if start is None:
        x = uniform_profile(lay).array()
    elif isinstance(start, np.ndarray):
        x = start.astype(float)
    else:
        x = as_profile(lay, start).array()
    best_x, best_r = x, math.inf
    it = 0
    prev = math.inf
    beta = 1.0
    while it < max_iter:
        fx = field.brouwer(x)
        r = float(np.abs(fx - x).max())
        if r < best_r:
            best_x, best_r = x, r
        if r < eps_fp:
            break
        # plain Picard steps can cycle; damping keeps the same fixed points
        if r > prev:
            beta = max(beta / 2, MIN_DAMPING)
        prev = r
        x = x + beta * (fx - x)
        it += 1
    prof = Profile(lay, best_x.tolist())
    status = SOLVED if best_r < eps_fp else UNCONVERGED
    from .verify import verify_cdt

    chk = verify_cdt(game, prof, eps)
    values = tuple(float(u.evaluate(prof.values)) for u in game.utility_polynomials)
    extras = {"eps_prime": eps_prime(game, best_r), "verify_cdt": chk.to_json(), "damping": beta}
    return EquilibriumReport("cdt", status, eps, prof, "fixed-point residual", values, {"fixed_point": best_r, "cdt": chk.residual}, it, prov, extras)


def solve_cdt_pgd_single_player(game: Game, eps, step=None, max_iter: int | None = None, start=None, iteration_constant: int = 1) -> EquilibriumReport:
    """Projected gradient ascent with fixed step 1 / L_inf.

    Stops once the iterate is an eps-well-supported CDT point; the default
    iteration cap is ``ceil(c * L_inf * |H| / eps^2)`` with ``c`` given by
    ``iteration_constant``.
    """
    from .verify import kkt_residual, verify_cdt_well_supported

    eps = positive_eps(eps)
    strategic = [i for i in range(game.num_players) if game.layout.player_blocks(i)]
    if len(strategic) > 1:
        fail("DIMENSION_TOO_LARGE", "projected gradient solver needs a single strategic player")
    lay = game.layout
    L = float(game.lipschitz.l_inf)
    eta = float(step) if step is not None else 1.0 / L
    cap = max_iter if max_iter is not None else math.ceil(iteration_constant * L * game.size / float(eps) ** 2)
    prov = game_provenance(game, step=eta, max_iter=cap)
    if lay.size == 0:
        prof = Profile(lay, [])
        return EquilibriumReport("cdt-pgd", SOLVED, eps, prof, "kkt", (), {"kkt": 0}, 0, prov)
    player = strategic[0]
    field = _FastField(game)
    x = uniform_profile(lay).array() if start is None else as_profile(lay, start).array()
    it = 0
    status = UNCONVERGED
    ws = None
    while True:
        prof = Profile(lay, x.tolist(), check=False)
        ws = verify_cdt_well_supported(game, prof, eps)
        if ws.passed:
            status = SOLVED
            break
        if it >= cap:
            break
        g = field.gradient(x)
        x = project_to_simplex_product(x + eta * g, lay).array()
        it += 1
    kkt = kkt_residual(game, prof)
    values = (float(game.utility_polynomials[player].evaluate(prof.values)),)
    return EquilibriumReport("cdt-pgd", status, eps, prof, "well-supported cdt", values, {"well_supported": ws.residual, "kkt": kkt.residual}, it, prov)
