"""Reference computations that work on raw game documents, not on the package.

They walk the JSON tree directly, so they share no code with the solvers.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def strategy_map(layout, values):
    """{(player 1-based, label): {action: prob}} from a flat value vector."""
    out = {}
    for b in layout.blocks:
        out[(b.player + 1, b.label)] = {a: values[b.offset + k] for k, a in enumerate(b.actions)}
    return out


def tree_utility(node, player, strat, exact=True):
    """Expected payoff of ``player`` (0-based) below ``node``."""
    num = Fraction if exact else (lambda x: float(Fraction(x)))
    kind, body = next(iter(node.items()))
    if kind == "terminal":
        return num(body["payoffs"][player])
    if kind == "chance":
        return sum(num(p) * tree_utility(body["children"][a], player, strat, exact) for a, p in body["dist"])
    probs = strat[(body["player"], body["infoset"])]
    return sum(probs[a] * tree_utility(body["children"][a], player, strat, exact) for a in body["actions"])


def tree_reach_terminals(node, strat, acc=Fraction(1)):
    """Reach probabilities of all terminals, in document order."""
    kind, body = next(iter(node.items()))
    if kind == "terminal":
        return [acc]
    out = []
    if kind == "chance":
        for a, p in body["dist"]:
            out += tree_reach_terminals(body["children"][a], strat, acc * Fraction(p))
        return out
    probs = strat[(body["player"], body["infoset"])]
    for a in body["actions"]:
        out += tree_reach_terminals(body["children"][a], strat, acc * probs[a])
    return out


def count_nodes(node):
    kind, body = next(iter(node.items()))
    if kind == "terminal":
        return 1
    return 1 + sum(count_nodes(c) for c in body["children"].values())


def compositions(m, N):
    """All integer vectors of length m with entries >= 0 summing to N."""
    for cut in itertools.combinations(range(N + m - 1), m - 1):
        prev = -1
        row = []
        for c in cut:
            row.append(c - prev - 1)
            prev = c
        row.append(N + m - 2 - prev)
        yield row


def brute_cut(edges, z):
    return sum(w for u, v, w in edges if z[u] != z[v])


def brute_clause_count(clauses, assignment):
    return sum(all(assignment[abs(l) - 1] == (l > 0) for l in c) for c in clauses)


def matrix_value(A, N=200):
    """Max-min of a 2x2 or 2xn matrix game by a fine mixed grid for the row player."""
    best = None
    for k in range(N + 1):
        p = Fraction(k, N)
        worst = min(p * A[0][j] + (1 - p) * A[1][j] for j in range(len(A[0])))
        if best is None or worst > best:
            best = worst
    return best
