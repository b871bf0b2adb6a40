"""Extensive-form games with imperfect recall.

Games are read from a nested JSON document::

    {"players": 2,
     "infosets": [{"player": 1, "label": "I1", "actions": ["L", "R"]}, ...],   # optional
     "root": {"decision": {"player": 1, "infoset": "I1", "actions": ["L", "R"],
                           "children": {"L": {...}, "R": {...}}}}}

Chance nodes are ``{"chance": {"dist": [["a", "1/2"], ...], "children": {...}}}``
and terminals ``{"terminal": {"payoffs": ["3", "-1"]}}``.  Players are numbered
from 1 in documents and from 0 in the Python API.  Infoset labels are global:
one label belongs to one player.  Without an ``infosets`` declaration the
per-player infoset order is the order of first appearance in a depth-first,
children-in-action-order walk.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .errors import RecallError, fail
from .strategy import Profile, ProfileLayout, as_profile


@dataclass(frozen=True)
class Issue:
    code: str
    path: str
    message: str

    def to_json(self) -> dict:
        return {"code": self.code, "path": self.path, "message": self.message}


def parse_rational(x) -> Fraction:
    if isinstance(x, bool):
        raise ValueError("boolean is not a number")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise ValueError(f"not a number: {x!r}")


def positive_eps(eps) -> Fraction:
    """Parse a precision and reject values that are not positive."""
    try:
        e = parse_rational(eps)
    except (ValueError, ZeroDivisionError):
        fail("MALFORMED", f"not a rational number: {eps!r}")
    if e <= 0:
        fail("NONPOSITIVE_EPS", "eps must be positive")
    return e


def validate(doc) -> list[Issue]:
    """All structural problems of a raw game document (empty when valid)."""
    issues: list[Issue] = []

    def add(code, path, msg):
        issues.append(Issue(code, path, msg))

    if not isinstance(doc, dict) or "root" not in doc or "players" not in doc:
        add("MALFORMED", "$", "expected an object with 'players' and 'root'")
        return issues
    try:
        n = int(doc["players"])
        if n < 1:
            raise ValueError
    except (TypeError, ValueError):
        add("MALFORMED", "$.players", "players must be a positive integer")
        return issues

    owner: dict[str, int] = {}
    actions_of: dict[str, tuple] = {}
    for k, d in enumerate(doc.get("infosets", []) or []):
        path = f"$.infosets[{k}]"
        try:
            p = int(d["player"])
            label = str(d["label"])
            acts = tuple(str(a) for a in d["actions"])
        except (KeyError, TypeError, ValueError):
            add("MALFORMED", path, "infoset declaration needs player, label, actions")
            continue
        if not 1 <= p <= n:
            add("MALFORMED", path, f"player {p} out of range")
        if label in owner:
            code = "CROSS_PLAYER_INFOSET" if owner[label] != p else "MALFORMED"
            add(code, path, f"infoset {label!r} declared twice")
            continue
        owner[label] = p
        actions_of[label] = acts
    declared = set(owner)
    used: set[str] = set()

    stack = [(doc["root"], "$.root")]
    while stack:
        node, path = stack.pop()
        if not isinstance(node, dict) or len(node) != 1:
            add("MALFORMED", path, "node must have exactly one of decision/chance/terminal")
            continue
        kind, body = next(iter(node.items()))
        if not isinstance(body, dict):
            add("MALFORMED", path, "node body must be an object")
            continue
        if kind == "terminal":
            pay = body.get("payoffs")
            if not isinstance(pay, list) or len(pay) != n:
                add("MALFORMED", path, f"terminal needs {n} payoffs")
            else:
                for x in pay:
                    try:
                        parse_rational(x)
                    except (ValueError, ZeroDivisionError):
                        add("MALFORMED", path, f"bad payoff {x!r}")
            if body.get("children"):
                add("ORPHAN_NODE", path, "terminal node has children")
            continue
        children = body.get("children")
        if not isinstance(children, dict):
            add("MALFORMED", path, "missing children")
            continue
        if kind == "chance":
            dist = body.get("dist")
            if not isinstance(dist, list) or not dist:
                add("MALFORMED", path, "chance node needs a nonempty dist")
                continue
            labels = []
            total = Fraction(0)
            bad = False
            for entry in dist:
                try:
                    a, w = entry
                    w = parse_rational(w)
                except (TypeError, ValueError, ZeroDivisionError):
                    add("MALFORMED", path, f"bad dist entry {entry!r}")
                    bad = True
                    continue
                if w < 0:
                    add("CHANCE_NOT_NORMALIZED", path, f"negative weight {w} for {a!r}")
                    bad = True
                labels.append(str(a))
                total += w
            if not bad and total != 1:
                add("CHANCE_NOT_NORMALIZED", path, f"weights sum to {total}")
        elif kind == "decision":
            try:
                p = int(body["player"])
                label = str(body["infoset"])
                labels = [str(a) for a in body["actions"]]
            except (KeyError, TypeError, ValueError):
                add("MALFORMED", path, "decision node needs player, infoset, actions")
                continue
            if not 1 <= p <= n:
                add("MALFORMED", path, f"player {p} out of range")
            if not labels:
                add("MALFORMED", path, "decision node without actions")
            if label in owner and owner[label] != p:
                add("CROSS_PLAYER_INFOSET", path, f"infoset {label!r} belongs to player {owner[label]}, node says {p}")
            else:
                owner.setdefault(label, p)
            if label in actions_of and tuple(labels) != actions_of[label]:
                add("ACTION_SET_MISMATCH", path, f"actions {labels} differ from {list(actions_of[label])} in {label!r}")
            else:
                actions_of.setdefault(label, tuple(labels))
            used.add(label)
        else:
            add("MALFORMED", path, f"unknown node kind {kind!r}")
            continue
        if len(set(labels)) != len(labels):
            add("MALFORMED", path, "duplicate action labels")
        for key in children:
            if key not in labels:
                add("ORPHAN_NODE", f"{path}.children.{key}", f"child {key!r} has no matching action")
        for a in labels:
            if a not in children:
                add("ORPHAN_NODE", path, f"action {a!r} leads nowhere")
        for a in reversed(labels):
            if a in children:
                stack.append((children[a], f"{path}.children.{a}"))
    for label in sorted(declared - used):
        add("MALFORMED", "$.infosets", f"declared infoset {label!r} has no nodes")
    return issues


@dataclass(frozen=True)
class Node:
    id: int
    kind: str  # "decision", "chance" or "terminal"
    parent: int | None
    parent_action: int | None
    depth: int
    player: int | None = None
    block: int | None = None
    actions: tuple[str, ...] = ()
    children: tuple[int, ...] = ()
    probs: tuple[Fraction, ...] = ()
    payoffs: tuple[Fraction, ...] = ()


class Game:
    """Validated, immutable game tree; node ids follow depth-first preorder."""

    def __init__(self, num_players: int, nodes: Sequence[Node], layout: ProfileLayout, meta: dict | None = None):
        self.num_players = num_players
        self.nodes = tuple(nodes)
        self.layout = layout
        self.meta = dict(meta or {})
        self.root = 0

    # construction
    @classmethod
    def from_json(cls, doc: dict) -> "Game":
        issues = validate(doc)
        if issues:
            raise RecallError(issues[0].code, issues[0].message, issues)
        n = int(doc["players"])
        order: list[tuple[int, str, tuple]] = []
        seen: dict[str, int] = {}
        for d in doc.get("infosets", []) or []:
            seen[str(d["label"])] = len(order)
            order.append((int(d["player"]) - 1, str(d["label"]), tuple(str(a) for a in d["actions"])))
        raw: list[tuple] = []

        def walk(node, parent, parent_action, depth):
            kind, body = next(iter(node.items()))
            nid = len(raw)
            raw.append(None)
            if kind == "terminal":
                raw[nid] = (kind, parent, parent_action, depth, None, None, (), (), (), tuple(parse_rational(x) for x in body["payoffs"]))
                return nid
            if kind == "chance":
                acts = tuple(str(a) for a, _ in body["dist"])
                probs = tuple(parse_rational(w) for _, w in body["dist"])
                player = label = None
            else:
                acts = tuple(str(a) for a in body["actions"])
                probs = ()
                player = int(body["player"]) - 1
                label = str(body["infoset"])
                if label not in seen:
                    seen[label] = len(order)
                    order.append((player, label, acts))
            kids = []
            for k, a in enumerate(acts):
                kids.append(walk(body["children"][a], nid, k, depth + 1))
            raw[nid] = (kind, parent, parent_action, depth, player, label, acts, tuple(kids), probs, ())
            return nid

        walk(doc["root"], None, None, 0)
        layout = ProfileLayout.build(n, order)
        block_of = {b.label: k for k, b in enumerate(layout.blocks)}
        nodes = []
        for nid, (kind, parent, pa, depth, player, label, acts, kids, probs, pay) in enumerate(raw):
            nodes.append(Node(nid, kind, parent, pa, depth, player, block_of.get(label) if label is not None else None, acts, kids, probs, pay))
        return cls(n, nodes, layout, doc.get("meta"))

    def to_json(self) -> dict:
        def emit(nid):
            nd = self.nodes[nid]
            if nd.kind == "terminal":
                return {"terminal": {"payoffs": [str(x) for x in nd.payoffs]}}
            kids = {a: emit(c) for a, c in zip(nd.actions, nd.children)}
            if nd.kind == "chance":
                return {"chance": {"dist": [[a, str(w)] for a, w in zip(nd.actions, nd.probs)], "children": kids}}
            b = self.layout.blocks[nd.block]
            return {"decision": {"player": nd.player + 1, "infoset": b.label, "actions": list(nd.actions), "children": kids}}

        doc = {"players": self.num_players, "infosets": self.layout.to_json()["infosets"], "root": emit(0)}
        if self.meta:
            doc["meta"] = self.meta
        return doc

    def canonical_json(self) -> str:
        doc = self.to_json()
        doc.pop("meta", None)
        return json.dumps(doc, separators=(",", ":"), ensure_ascii=False)

    @cached_property
    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    # structure
    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def size(self) -> int:
        """Number of nodes |H|, terminals included."""
        return len(self.nodes)

    @cached_property
    def terminals(self) -> tuple[int, ...]:
        return tuple(nd.id for nd in self.nodes if nd.kind == "terminal")

    @cached_property
    def chance_nodes(self) -> tuple[int, ...]:
        return tuple(nd.id for nd in self.nodes if nd.kind == "chance")

    @cached_property
    def infoset_nodes(self) -> tuple[tuple[int, ...], ...]:
        out = [[] for _ in self.layout.blocks]
        for nd in self.nodes:
            if nd.kind == "decision":
                out[nd.block].append(nd.id)
        return tuple(tuple(x) for x in out)

    def path(self, nid: int) -> list[int]:
        """Node ids from the root down to ``nid``."""
        out = []
        while nid is not None:
            out.append(nid)
            nid = self.nodes[nid].parent
        return out[::-1]

    @cached_property
    def max_abs_payoff(self) -> Fraction:
        return max((abs(x) for t in self.terminals for x in self.nodes[t].payoffs), default=Fraction(0))

    def payoff_range(self, player: int) -> tuple[Fraction, Fraction]:
        vals = [self.nodes[t].payoffs[player] for t in self.terminals]
        return min(vals), max(vals)

    # cached algebra, filled by the bridge module
    @cached_property
    def utility_polynomials(self):
        from .bridge import extract_utility_polynomials

        return tuple(extract_utility_polynomials(self))

    @cached_property
    def lipschitz(self):
        from .poly import game_lipschitz

        return game_lipschitz(self.utility_polynomials, [self.layout.player_vars(i) for i in range(self.num_players)])

    @cached_property
    def gradient_polynomials(self):
        """``grad[i][v]`` is the partial of player i's utility in variable v."""
        return tuple(tuple(p.partial(v) for v in range(self.layout.size)) for p in self.utility_polynomials)

    def is_zero_sum(self) -> bool:
        if self.num_players != 2:
            return False
        p1, p2 = self.utility_polynomials
        return (p1 + p2).is_zero()


def load_game(doc_or_path) -> Game:
    if isinstance(doc_or_path, dict):
        return Game.from_json(doc_or_path)
    with open(doc_or_path, encoding="utf-8") as fh:
        return Game.from_json(json.load(fh))


def _edge_prob(game: Game, nid: int, k: int, vals):
    nd = game.nodes[nid]
    if nd.kind == "chance":
        return nd.probs[k]
    return vals[game.layout.blocks[nd.block].offset + k]


def reach_probability(game: Game, target: int, profile, from_node: int | None = None):
    """Probability of reaching ``target`` when starting at ``from_node``."""
    prof = as_profile(game.layout, profile)
    vals = prof.values
    start = game.root if from_node is None else from_node
    one = Fraction(1) if prof.exact else 1.0
    prob = one
    nid = target
    while nid != start:
        nd = game.nodes[nid]
        if nd.parent is None:
            return 0 * one
        prob *= _edge_prob(game, nd.parent, nd.parent_action, vals)
        nid = nd.parent
    return prob


def node_values(game: Game, player: int, vals, exact: bool) -> list:
    """U(mu | h) for every node h, bottom-up."""
    out = [None] * len(game.nodes)
    for nd in reversed(game.nodes):
        if nd.kind == "terminal":
            out[nd.id] = nd.payoffs[player] if exact else float(nd.payoffs[player])
        else:
            total = Fraction(0) if exact else 0.0
            for k, c in enumerate(nd.children):
                w = _edge_prob(game, nd.id, k, vals)
                if w:
                    total += (w if exact else float(w)) * out[c]
            out[nd.id] = total
    return out


def node_reach(game: Game, vals, exact: bool) -> list:
    """Prob(h | mu) for every node h, top-down."""
    out = [None] * len(game.nodes)
    out[0] = Fraction(1) if exact else 1.0
    for nd in game.nodes:
        for k, c in enumerate(nd.children):
            w = _edge_prob(game, nd.id, k, vals)
            out[c] = out[nd.id] * (w if exact else float(w))
    return out


def expected_utility(game: Game, player: int, profile, from_node: int | None = None):
    prof = as_profile(game.layout, profile)
    vals = node_values(game, player, prof.values, prof.exact)
    return vals[game.root if from_node is None else from_node]


@dataclass(frozen=True)
class Absentmindedness:
    per_infoset: tuple[int, ...]
    maximum: int


def degree_of_absentmindedness(game: Game) -> Absentmindedness:
    per = [0] * len(game.layout.blocks)
    counts = [0] * len(game.layout.blocks)

    def walk(nid):
        nd = game.nodes[nid]
        if nd.kind == "decision":
            counts[nd.block] += 1
            per[nd.block] = max(per[nd.block], counts[nd.block])
        for c in nd.children:
            walk(c)
        if nd.kind == "decision":
            counts[nd.block] -= 1

    import sys

    limit = sys.getrecursionlimit()
    if len(game.nodes) + 100 > limit:
        sys.setrecursionlimit(len(game.nodes) + 100)
    try:
        walk(game.root)
    finally:
        sys.setrecursionlimit(limit)
    return Absentmindedness(tuple(per), max(per, default=0))


def experienced_sequence(game: Game, player: int, nid: int) -> tuple[tuple[int, int], ...]:
    """(block, action) pairs of ``player``'s decisions strictly above ``nid``."""
    seq = []
    path = game.path(nid)
    for a, b in zip(path, path[1:]):
        nd = game.nodes[a]
        if nd.kind == "decision" and nd.player == player:
            seq.append((nd.block, game.nodes[b].parent_action))
    return tuple(seq)


@dataclass(frozen=True)
class RecallCheck:
    perfect: bool
    witness: tuple[int, int, int] | None = None  # (block, h, h')

    def __bool__(self) -> bool:
        return self.perfect


def has_perfect_recall(game: Game) -> RecallCheck:
    for k, members in enumerate(game.infoset_nodes):
        if not members:
            continue
        player = game.layout.blocks[k].player
        first = experienced_sequence(game, player, members[0])
        for h in members[1:]:
            if experienced_sequence(game, player, h) != first:
                return RecallCheck(False, (k, members[0], h))
    return RecallCheck(True)


def profile_for(game: Game, values) -> Profile:
    return as_profile(game.layout, values)
