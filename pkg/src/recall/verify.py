"""Equilibrium checks for the CDT, EDT and Nash concepts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import fail
from .game import Game
from .report import jsonable
from .strategy import as_profile


@dataclass
class VerifyResult:
    concept: str
    passed: bool
    eps: object
    residual: object  # worst violation found (exact where possible)
    bar: float = 0.0  # certified slack on top of residual
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def to_json(self) -> dict:
        return jsonable(
            {
                "concept": self.concept,
                "passed": self.passed,
                "eps": self.eps,
                "residual": self.residual,
                "bar": self.bar,
                "witness": self.witness,
                "details": self.details,
            }
        )


def _eps(eps):
    if isinstance(eps, float):
        if math.isnan(eps) or eps < 0:
            fail("NONPOSITIVE_EPS", "eps must be nonnegative")
        return eps
    e = Fraction(eps)
    if e < 0:
        fail("NONPOSITIVE_EPS", "eps must be nonnegative")
    return e


def _block_gradients(game: Game, prof):
    for i in range(game.num_players):
        grads = game.gradient_polynomials[i]
        for k in game.layout.player_blocks(i):
            b = game.layout.blocks[k]
            yield i, k, b, [grads[v].evaluate(prof.values) for v in b.vars]


def verify_cdt(game: Game, profile, eps) -> VerifyResult:
    """Every pure action's advantage is at most eps."""
    eps = _eps(eps)
    prof = as_profile(game.layout, profile)
    worst = Fraction(0) if prof.exact else 0.0
    wit = None
    for i, k, b, g in _block_gradients(game, prof):
        mean = sum(m * x for m, x in zip(prof.block(k), g))
        for a in range(b.size):
            adv = g[a] - mean
            if adv > worst:
                worst, wit = adv, {"player": i + 1, "infoset": b.label, "action": b.actions[a], "advantage": adv}
    return VerifyResult("cdt", worst <= eps, eps, worst, 0.0, wit)


@dataclass
class KktResult:
    residual: object
    kappa: dict  # (player, infoset label) -> multiplier
    tau: dict  # (player, infoset label, action) -> multiplier

    def to_json(self) -> dict:
        return jsonable(
            {
                "residual": self.residual,
                "kappa": {f"P{i + 1}.{lab}": v for (i, lab), v in self.kappa.items()},
                "tau": {f"P{i + 1}.{lab}.{a}": v for (i, lab, a), v in self.tau.items()},
            }
        )


def kkt_residual(game: Game, profile) -> KktResult:
    """kappa = max gradient per infoset, tau = kappa - gradient.

    The residual is the largest tau on the support, i.e. the worst
    complementary-slackness violation.
    """
    prof = as_profile(game.layout, profile)
    worst = Fraction(0) if prof.exact else 0.0
    kappa, tau = {}, {}
    for i, k, b, g in _block_gradients(game, prof):
        kap = max(g)
        kappa[(i, b.label)] = kap
        for a, m in enumerate(prof.block(k)):
            t = kap - g[a]
            tau[(i, b.label, b.actions[a])] = t
            if m > 0 and t > worst:
                worst = t
    return KktResult(worst, kappa, tau)


def verify_cdt_well_supported(game: Game, profile, eps) -> VerifyResult:
    """Every supported action is within eps of the best pure action."""
    eps = _eps(eps)
    prof = as_profile(game.layout, profile)
    worst = Fraction(0) if prof.exact else 0.0
    wit = None
    for i, k, b, g in _block_gradients(game, prof):
        top = max(g)
        for a, m in enumerate(prof.block(k)):
            if m > 0 and top - g[a] > worst:
                worst = top - g[a]
                wit = {"player": i + 1, "infoset": b.label, "action": b.actions[a], "shortfall": worst}
    return VerifyResult("cdt-ws", worst <= eps, eps, worst, 0.0, wit)


def verify_edt(game: Game, profile, eps, tol: float | None = None) -> VerifyResult:
    """Best single-infoset deviation gains at most eps.

    Each infoset's deviation problem is maximized by branch and bound to
    within ``tol`` (default eps/10).  The reported gain is attained by an
    exact witness, and ``bar`` bounds how much more any deviation could gain.
    """
    from .edt import block_best_deviation

    eps = _eps(eps)
    prof = as_profile(game.layout, profile)
    if tol is None:
        tol = float(eps) / 10 if eps > 0 else 1e-9
    utils = game.utility_polynomials
    worst = None
    wit = None
    bar = 0.0
    per = []
    for k, b in enumerate(game.layout.blocks):
        br = block_best_deviation(game, k, prof, tol)
        now = utils[b.player].evaluate(prof.values)
        gain = br.value - now
        per.append({"player": b.player + 1, "infoset": b.label, "gain": gain, "bar": br.bar})
        bar = max(bar, br.bar)
        if worst is None or gain > worst:
            worst = gain
            wit = {"player": b.player + 1, "infoset": b.label, "alpha": list(br.alpha), "gain": gain}
    if worst is None:
        worst = Fraction(0) if prof.exact else 0.0
    return VerifyResult("edt", worst <= eps, eps, worst, bar, wit, {"per_infoset": per, "tol": tol})


def verify_nash(game: Game, profile, eps, tol: float | None = None) -> VerifyResult:
    from .nash import nash_gap

    eps = _eps(eps)
    gap = nash_gap(game, profile, tol=tol)
    worst = max(gap.gains, default=Fraction(0))
    top = max(range(len(gap.gains)), key=lambda i: gap.gains[i], default=None)
    wit = None if top is None else {"player": top + 1, "gain": gap.gains[top], "strategy": gap.witnesses[top]}
    return VerifyResult("nash", worst <= eps, eps, worst, max(gap.bars, default=0.0), wit, {"gap": gap.to_json()})


def block_curvature(game: Game, k: int) -> Fraction:
    """Bound on |second partial| of the owner's utility within block k."""
    b = game.layout.blocks[k]
    grads = game.gradient_polynomials[b.player]
    return max((grads[u].partial(v).abs_coef_sum() for u in b.vars for v in b.vars), default=Fraction(0))


def edt_to_cdt_tolerance(game: Game, eps_edt):
    """CDT tolerance implied by an EDT gain bound ``eps_edt``.

    Along the segment from mu_I to a pure action the second derivative is at
    most K = 4 * (largest block curvature), so an advantage g forces an EDT
    gain of g t - K t^2 / 2 for every t in [0, 1].
    """
    K = 4 * max((block_curvature(game, k) for k in range(len(game.layout.blocks))), default=Fraction(0))
    # the linear and large-eps branches stay exact for rational input
    if K == 0:
        return eps_edt
    if 2 * eps_edt <= K:
        return math.sqrt(2 * float(K) * float(eps_edt))
    return eps_edt + (K / 2 if isinstance(eps_edt, Fraction) else float(K) / 2)
