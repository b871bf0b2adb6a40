"""Chance consolidation and chance removal."""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass
from fractions import Fraction

from .bridge import poly_to_game_doc
from .errors import fail
from .game import Game, positive_eps
from .strategy import Profile, as_profile


def _is_uniform_power_root(game: Game) -> int | None:
    """t if the only chance node is a uniform 2^t-ary root, else None."""
    ch = game.chance_nodes
    if len(ch) != 1 or ch[0] != game.root:
        return None
    nd = game.nodes[game.root]
    k = len(nd.probs)
    if k & (k - 1) or any(p != Fraction(1, k) for p in nd.probs):
        return None
    return k.bit_length() - 1


def consolidate_chance(game: Game) -> Game:
    """Equivalent game whose only chance node is a uniform 2^t-ary root.

    Built from the utility polynomials: root edge d carries monomial d with
    payoff ``coef * 2^t``; padding edges end in zero leaves.
    """
    polys = game.utility_polynomials
    r = len({m for p in polys for m in p.terms})
    t = math.ceil(math.log2(r)) if r > 1 else 0
    for tt in (t, t + 1):
        doc = poly_to_game_doc(polys, game.layout, root_edges=2**tt)
        doc["meta"] = {**{k: v for k, v in game.meta.items() if isinstance(v, (str, int))}, "consolidated": {"r": r, "t": tt, "rescale": str(Fraction(2**tt, max(r, 1)))}}
        out = Game.from_json(doc)
        # hanging unused infosets may add an edge when no zero leaf exists
        if _is_uniform_power_root(out) == tt:
            return out
    raise AssertionError("consolidation failed to produce a power-of-two root")


def precision_map(eps, t: int, l_inf, nodes: int) -> dict:
    """Precisions on the chance-free game that transfer back to eps."""
    eps = positive_eps(eps)
    e = eps
    L = Fraction(l_inf)
    base = e / (2**t + t * L)
    d_nash = min(Fraction(1, 4), e / 2**t)
    return {
        "delta_nash": d_nash,
        "delta_nash_conservative": min(Fraction(1, 4), base),
        "delta_edt": d_nash,
        "delta_cdt": (min(Fraction(1), base) / (3 * L * nodes)) ** 2,
    }


@dataclass
class ChanceRemoval:
    t: int
    shift: tuple  # per-player payoff shift applied before removal
    source: Game
    result: Game
    ic_block: int | None  # block index of the new infoset in the output

    def embed_profile(self, profile, l=Fraction(1, 2)) -> Profile:
        """Source profile plus probability ``l`` of action l at the new infoset."""
        prof = as_profile(self.source.layout, profile)
        src, dst = self.source.layout, self.result.layout
        vals = [None] * dst.size
        for b in src.blocks:
            k = dst.block_id(b.player, b.label)
            off = dst.blocks[k].offset
            for a in range(b.size):
                vals[off + a] = prof.values[b.offset + a]
        if self.ic_block is not None:
            off = dst.blocks[self.ic_block].offset
            lv = l if prof.exact or not isinstance(l, Fraction) else float(l)
            vals[off], vals[off + 1] = lv, 1 - lv
        return Profile(dst, vals)

    def precision(self, eps) -> dict:
        return precision_map(eps, self.t, self.source.lipschitz.l_inf, self.result.size)

    def to_json(self) -> dict:
        return {"t": self.t, "shift": [str(s) for s in self.shift], "ic_infoset": None if self.ic_block is None else self.result.layout.blocks[self.ic_block].label}


def _shift_leaves(node, shift) -> None:
    kind, body = next(iter(node.items()))
    if kind == "terminal":
        body["payoffs"] = [str(Fraction(x) + s) for x, s in zip(body["payoffs"], shift)]
        return
    for child in body["children"].values():
        _shift_leaves(child, shift)


def _fresh_label(game: Game, base: str = "Ic") -> str:
    taken = {b.label for b in game.layout.blocks}
    label, k = base, 1
    while label in taken:
        label, k = f"{base}{k}", k + 1
    return label


def _gadget(label: str, slots: list, t: int, n: int) -> dict:
    """Depth-2t tree of P1 nodes in one infoset; level-2t slots take ``slots``."""
    it = iter(slots)

    def leaf(u):
        return {"terminal": {"payoffs": [str(u)] * n}}

    def dec(l_child, r_child):
        return {"decision": {"player": 1, "infoset": label, "actions": ["l", "r"], "children": {"l": l_child, "r": r_child}}}

    def even(level):
        # an even-level node; at level 2t it is a slot
        if level == 2 * t:
            return next(it)
        pay = -1 if level == 0 else 0
        return dec(dec(leaf(pay), even(level + 2)), dec(even(level + 2), leaf(pay)))

    return even(0)


def remove_chance(game: Game) -> tuple[Game, ChanceRemoval]:
    """Replace a uniform 2^t-ary chance root by an absentminded P1 infoset.

    Payoffs are first shifted so every player's payoffs are at least 1.
    The new utility is ``-l^2 - (1-l)^2 + 2^t (l(1-l))^t U(mu)`` where U is
    the shifted utility and l the probability of action l.
    """
    if not game.chance_nodes:
        return game, ChanceRemoval(0, (Fraction(0),) * game.num_players, game, game, None)
    t = _is_uniform_power_root(game)
    if t is None:
        fail("NEEDS_CONSOLIDATION", "expected a single uniform 2^t-ary chance root; run consolidate_chance first")
    n = game.num_players
    shift = tuple(max(Fraction(0), 1 - game.payoff_range(i)[0]) for i in range(n))
    doc = copy.deepcopy(game.to_json())
    body = doc["root"]["chance"]
    subtrees = [body["children"][a] for a, _ in body["dist"]]
    for st in subtrees:
        _shift_leaves(st, shift)
    infosets = doc["infosets"]
    if t == 0:
        # a one-edge chance node is no randomness at all: contract it
        root = subtrees[0]
        ic = None
    else:
        label = _fresh_label(game)
        root = _gadget(label, subtrees, t, n)
        last_p1 = max((k for k, d in enumerate(infosets) if d["player"] == 1), default=-1)
        infosets = infosets[: last_p1 + 1] + [{"player": 1, "label": label, "actions": ["l", "r"]}] + infosets[last_p1 + 1 :]
        ic = label
    meta = {k: v for k, v in game.meta.items() if isinstance(v, (str, int))}
    meta["chance_removed"] = {"t": t, "shift": [str(s) for s in shift]}
    out = Game.from_json({"players": n, "infosets": infosets, "root": root, "meta": meta})
    ic_block = None if ic is None else out.layout.block_id(0, ic)
    return out, ChanceRemoval(t, shift, game, out, ic_block)


def v_formula(removal: ChanceRemoval, player: int, profile, l):
    """Closed form of the chance-free utility at (profile, l)."""
    prof = as_profile(removal.source.layout, profile)
    u = removal.source.utility_polynomials[player].evaluate(prof.values) + removal.shift[player]
    t = removal.t
    if t == 0:
        return u
    return -(l**2) - (1 - l) ** 2 + 2**t * (l * (1 - l)) ** t * u
