"""Catalog of small example games with machine-readable known facts."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import fail
from .game import Game


@dataclass(frozen=True)
class KnownFact:
    concept: str  # what is claimed, e.g. "maxmin" or "edt_equilibrium"
    value: object  # number, profile or flag
    tolerance: float = 0.0
    basis: str = "derived"  # "stated" for facts given with the game, else "derived"
    note: str = ""


def _t(*payoffs) -> dict:
    return {"terminal": {"payoffs": [str(Fraction(p)) for p in payoffs]}}


def _d(player: int, infoset: str, actions: Sequence[str], kids: Sequence[dict]) -> dict:
    return {"decision": {"player": player, "infoset": infoset, "actions": list(actions), "children": dict(zip(actions, kids))}}


def _zs(u) -> dict:
    return _t(u, -Fraction(u))


def _make(doc: dict, name: str, facts: Sequence[KnownFact], **params) -> Game:
    doc["meta"] = {"name": name, **{k: str(v) for k, v in params.items()}}
    g = Game.from_json(doc)
    g.known_facts = tuple(facts)
    return g


def _kick_tree(top_label: str, second_label: str, ll) -> dict:
    """Shoot twice (L/R); a goalkeeper guesses only after matching shots."""

    def keeper(a, b):
        return _d(2, "J", ["L", "R"], [_zs(a), _zs(b)])

    return _d(
        1,
        top_label,
        ["L", "R"],
        [
            _d(1, second_label, ["L", "R"], [keeper(ll, 3), keeper(-1, -1)]),
            _d(1, second_label, ["L", "R"], [keeper(-1, -1), keeper(3, -1)]),
        ],
    )


def forgetful_shootout() -> Game:
    """Two-player zero-sum; P1 forgets her first kick direction."""
    doc = {
        "players": 2,
        "infosets": [
            {"player": 1, "label": "I1", "actions": ["L", "R"]},
            {"player": 1, "label": "I2", "actions": ["L", "R"]},
            {"player": 2, "label": "J", "actions": ["L", "R"]},
        ],
        "root": _kick_tree("I1", "I2", -1),
    }
    facts = [
        KnownFact("maxmin", 0, 0.02, "stated"),
        KnownFact("minmax", 1, 0.02, "stated"),
        KnownFact("duality_gap", 1, 0.04, "stated"),
        KnownFact("no_exact_nash", True, 0.25, "stated", "no 1/4-Nash equilibrium either"),
        KnownFact("nodes", 15),
        KnownFact("perfect_recall", False, basis="stated"),
        KnownFact("zero_sum", True, basis="stated"),
    ]
    return _make(doc, "shootout", facts)


def absentminded_driver() -> Game:
    """Exit (e) or continue (c) at three indistinguishable junctions; U = 6 c^2 e."""
    doc = {
        "players": 1,
        "infosets": [{"player": 1, "label": "I", "actions": ["e", "c"]}],
        "root": _d(1, "I", ["e", "c"], [_t(0), _d(1, "I", ["e", "c"], [_t(0), _d(1, "I", ["e", "c"], [_t(6), _t(0)])])]),
    }
    facts = [
        KnownFact("optimum_value", Fraction(8, 9), 1e-9),
        KnownFact("optimum_profile", (Fraction(1, 3), Fraction(2, 3)), 1e-9),
        KnownFact("cdt_equilibria", ((Fraction(1, 3), Fraction(2, 3)), (Fraction(1), Fraction(0)))),
        KnownFact("not_edt", (Fraction(1), Fraction(0)), note="uniform deviation earns 3/4"),
        KnownFact("absentmindedness", 3, basis="stated"),
    ]
    return _make(doc, "driver", facts)


def coordination_game(lam=2) -> Game:
    """Single player, two infosets; matching choices pay 1 (left) or lam (right)."""
    lam = Fraction(lam)
    doc = {
        "players": 1,
        "infosets": [
            {"player": 1, "label": "I1", "actions": ["l1", "r1"]},
            {"player": 1, "label": "I2", "actions": ["l2", "r2"]},
        ],
        "root": _d(1, "I1", ["l1", "r1"], [_d(1, "I2", ["l2", "r2"], [_t(1), _t(0)]), _d(1, "I2", ["l2", "r2"], [_t(0), _t(lam)])]),
    }
    facts = [
        KnownFact("edt_equilibrium", ((1, 0, 1, 0), 1), basis="stated"),
        KnownFact("edt_equilibrium", ((0, 1, 0, 1), lam), basis="stated"),
        KnownFact("optimum_value", lam, basis="stated"),
    ]
    return _make(doc, "coordination", facts, lam=lam)


def absentminded_kicker(lam=3) -> Game:
    """Shoot-out variant where P1's two kicks share one infoset."""
    lam = Fraction(lam)
    doc = {
        "players": 2,
        "infosets": [
            {"player": 1, "label": "I", "actions": ["L", "R"]},
            {"player": 2, "label": "J", "actions": ["L", "R"]},
        ],
        "root": _kick_tree("I", "I", lam),
    }
    facts = [KnownFact("absentmindedness", 2)]
    if lam >= 3:
        facts.append(KnownFact("edt_equilibrium", ((1, 0, 0, 1), 3), basis="stated", note="pure L against pure R"))
        facts.append(KnownFact("maxmin", 3, 0.02))
        facts.append(KnownFact("minmax", 3, 0.02))
    else:
        facts.append(KnownFact("no_edt_equilibrium", True, 0.05, "stated"))
    return _make(doc, "kicker", facts, lam=lam)


def dont_go_straight(n: int = 5) -> Game:
    """n indistinguishable decision nodes; exiting anywhere pays 1."""
    if n < 1:
        fail("MALFORMED", "dont_go_straight needs n >= 1")
    node = _t(0)
    for _ in range(n):
        node = _d(1, "I", ["e", "c"], [_t(1), node])
    doc = {"players": 1, "infosets": [{"player": 1, "label": "I", "actions": ["e", "c"]}], "root": node}
    facts = [
        KnownFact("cdt_utility_exit_vs_continue", n, basis="stated"),
        KnownFact("absentmindedness", n),
    ]
    return _make(doc, "dont-go-straight", facts, n=n)


def matrix_game(A: Sequence[Sequence], name: str = "matrix") -> Game:
    """Simultaneous zero-sum game: P2 picks a column without seeing the row."""
    rows = [f"r{i + 1}" for i in range(len(A))]
    cols = [f"c{j + 1}" for j in range(len(A[0]))]
    doc = {
        "players": 2,
        "infosets": [{"player": 1, "label": "R", "actions": rows}, {"player": 2, "label": "C", "actions": cols}],
        "root": _d(1, "R", rows, [_d(2, "C", cols, [_zs(x) for x in row]) for row in A]),
    }
    return _make(doc, name, [KnownFact("perfect_recall", True)])


def matching_pennies() -> Game:
    g = matrix_game([[1, -1], [-1, 1]], "matching-pennies")
    g.known_facts += (KnownFact("value", 0), KnownFact("nash_profile", (Fraction(1, 2),) * 4))
    return g


def mini_poker() -> Game:
    """Chance deals P1 high or low; P1 bets or checks; P2 calls or folds a bet."""

    def hand(label, win):
        s = 1 if win else -1
        return _d(1, label, ["bet", "check"], [_d(2, "B", ["call", "fold"], [_zs(2 * s), _zs(1)]), _zs(s)])

    doc = {
        "players": 2,
        "infosets": [
            {"player": 1, "label": "H", "actions": ["bet", "check"]},
            {"player": 1, "label": "Lo", "actions": ["bet", "check"]},
            {"player": 2, "label": "B", "actions": ["call", "fold"]},
        ],
        "root": {"chance": {"dist": [["high", "1/2"], ["low", "1/2"]], "children": {"high": hand("H", True), "low": hand("Lo", False)}}},
    }
    # P1 always bets high, bluffs low w.p. 1/3; P2 calls w.p. 2/3; value 1/3
    facts = [
        KnownFact("perfect_recall", True),
        KnownFact("value", Fraction(1, 3)),
        KnownFact("nash_profile", (1, 0, Fraction(1, 3), Fraction(2, 3), Fraction(2, 3), Fraction(1, 3))),
    ]
    return _make(doc, "mini-poker", facts)


CATALOG: dict[str, Callable[..., Game]] = {
    "shootout": forgetful_shootout,
    "driver": absentminded_driver,
    "coordination": coordination_game,
    "kicker": absentminded_kicker,
    "dont-go-straight": dont_go_straight,
    "matching-pennies": matching_pennies,
    "mini-poker": mini_poker,
}

PERFECT_RECALL_FIXTURES = ("matching-pennies", "mini-poker", "dont-go-straight-1")


def catalog_names() -> list[str]:
    return list(CATALOG)


def build(name: str, lam=None, n: int | None = None) -> Game:
    if name == "dont-go-straight-1":
        return dont_go_straight(1)
    if name not in CATALOG:
        fail("UNKNOWN_GAME", f"no catalog game named {name!r}")
    if name in ("coordination", "kicker") and lam is not None:
        return CATALOG[name](lam)
    if name == "dont-go-straight" and n is not None:
        return dont_go_straight(n)
    return CATALOG[name]()


def all_games() -> list[Game]:
    """One instance of every catalog entry with default parameters."""
    return [build(name) for name in CATALOG]


def known_facts(game: Game) -> tuple:
    return tuple(getattr(game, "known_facts", ()))
