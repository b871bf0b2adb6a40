"""Game to polynomial and polynomial to game."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import fail
from .poly import Monomial, Polynomial
from .strategy import ProfileLayout


def extract_utility_polynomials(game) -> list[Polynomial]:
    """One utility polynomial per player, one monomial per terminal."""
    layout = game.layout
    n = layout.size
    acc = [dict() for _ in range(game.num_players)]
    for t in game.terminals:
        counts: dict[int, int] = {}
        weight = Fraction(1)
        nid = t
        while game.nodes[nid].parent is not None:
            nd = game.nodes[nid]
            par = game.nodes[nd.parent]
            if par.kind == "chance":
                weight *= par.probs[nd.parent_action]
            else:
                v = layout.blocks[par.block].offset + nd.parent_action
                counts[v] = counts.get(v, 0) + 1
            nid = nd.parent
        if not weight:
            continue
        mono: Monomial = tuple(sorted(counts.items()))
        for i, u in enumerate(game.nodes[t].payoffs):
            if u:
                acc[i][mono] = acc[i].get(mono, Fraction(0)) + u * weight
    return [Polynomial(n, a, layout) for a in acc]


def _support(polys: Sequence[Polynomial]) -> list[Monomial]:
    supp = set()
    for p in polys:
        supp.update(p.terms)
    return sorted(supp, key=lambda m: (sum(e for _, e in m), m))


def poly_to_game_doc(polys: Sequence[Polynomial], layout: ProfileLayout, strict: bool = False, root_edges: int | None = None) -> dict:
    """Game document whose utility polynomials are exactly ``polys``.

    A uniform chance root picks one monomial D of the common support; its
    subtree is a chain of decision nodes, one per unit of D's exponents in
    variable order, continuing only along the monomial's action.  The chain
    end pays ``coef * |supp|``; every other leaf pays 0.  Infosets that no
    monomial touches are hung below a zero leaf so the layout is preserved.

    With ``root_edges`` the chance root always has that many uniform edges
    (at least ``|supp|``); the extra edges lead to zero leaves.
    """
    N = layout.num_players
    if len(polys) != N:
        fail("LAYOUT_MISMATCH", f"{len(polys)} polynomials for {N} players")
    for p in polys:
        if p.nvars != layout.size:
            fail("LAYOUT_MISMATCH", f"polynomial has {p.nvars} variables, layout has {layout.size}")
    supp = _support(polys)
    zero = ["0"] * N
    infosets = [{"player": b.player + 1, "label": b.label, "actions": list(b.actions)} for b in layout.blocks]
    block_of = layout.block_of_var()

    if root_edges is not None and root_edges < max(1, len(supp)):
        fail("LAYOUT_MISMATCH", f"{root_edges} root edges cannot hold {len(supp)} monomials")
    if not supp and root_edges is None:
        if strict:
            fail("EMPTY_SUPPORT", "all polynomials are zero")
        used: set[int] = set()
        root = {"terminal": {"payoffs": zero}}
    else:
        if not supp and strict:
            fail("EMPTY_SUPPORT", "all polynomials are zero")
        r = root_edges or len(supp)
        used = {block_of[v] for m in supp for v, _ in m}

        def chain(seq, payoffs):
            if not seq:
                return {"terminal": {"payoffs": payoffs}}
            v = seq[0]
            b = layout.blocks[block_of[v]]
            k = v - b.offset
            kids = {a: ({"terminal": {"payoffs": list(zero)}} if j != k else chain(seq[1:], payoffs)) for j, a in enumerate(b.actions)}
            return {"decision": {"player": b.player + 1, "infoset": b.label, "actions": list(b.actions), "children": kids}}

        kids = {}
        dist = []
        for d, mono in enumerate(supp):
            seq = [v for v, e in mono for _ in range(e)]
            pay = [str(p.terms.get(mono, Fraction(0)) * r) for p in polys]
            kids[f"m{d}"] = chain(seq, pay)
            dist.append([f"m{d}", str(Fraction(1, r))])
        for d in range(len(supp), r):
            kids[f"pad{d}"] = {"terminal": {"payoffs": list(zero)}}
            dist.append([f"pad{d}", str(Fraction(1, r))])
        root = {"chance": {"dist": dist, "children": kids}}

    unused = [k for k in range(len(layout.blocks)) if k not in used]
    if unused:
        root = _hang_unused(root, unused, layout, zero)
    return {"players": N, "infosets": infosets, "root": root}


def _unused_chain(unused, layout, zero):
    b = layout.blocks[unused[0]]
    rest = unused[1:]
    kids = {}
    for j, a in enumerate(b.actions):
        kids[a] = _unused_chain(rest, layout, zero) if (j == 0 and rest) else {"terminal": {"payoffs": list(zero)}}
    return {"decision": {"player": b.player + 1, "infoset": b.label, "actions": list(b.actions), "children": kids}}


def _hang_unused(root, unused, layout, zero):
    gadget = _unused_chain(unused, layout, zero)

    def replace_first_zero_leaf(node) -> bool:
        kind, body = next(iter(node.items()))
        if kind == "terminal":
            return False
        for a, child in body["children"].items():
            ck, cb = next(iter(child.items()))
            if ck == "terminal" and all(Fraction(x) == 0 for x in cb["payoffs"]):
                body["children"][a] = gadget
                return True
            if replace_first_zero_leaf(child):
                return True
        return False

    if replace_first_zero_leaf(root):
        return root
    # no zero leaf anywhere: add a zero-payoff chance branch and rescale
    if "chance" in root:
        body = root["chance"]
        r = len(body["dist"])
        kids = dict(body["children"])
        dist = [[a, str(Fraction(1, r + 1))] for a, _ in body["dist"]]
        for a in kids:
            _scale_leaves(kids[a], Fraction(r + 1, r))
        kids["pad"] = gadget
        dist.append(["pad", str(Fraction(1, r + 1))])
        return {"chance": {"dist": dist, "children": kids}}
    _scale_leaves(root, Fraction(2))
    return {"chance": {"dist": [["m0", "1/2"], ["pad", "1/2"]], "children": {"m0": root, "pad": gadget}}}


def _scale_leaves(node, s: Fraction) -> None:
    kind, body = next(iter(node.items()))
    if kind == "terminal":
        body["payoffs"] = [str(Fraction(x) * s) for x in body["payoffs"]]
        return
    for child in body["children"].values():
        _scale_leaves(child, s)


def poly_to_game(polys: Sequence[Polynomial], layout: ProfileLayout, strict: bool = False, root_edges: int | None = None):
    from .game import Game

    return Game.from_json(poly_to_game_doc(polys, layout, strict, root_edges))


def cube_layout(n: int, labels: Sequence[str] | None = None) -> ProfileLayout:
    """Single player, ``n`` infosets with two actions each."""
    labels = labels or [f"X{j + 1}" for j in range(n)]
    return ProfileLayout.build(1, [(0, labels[j], ("hi", "lo")) for j in range(n)])


def cube_embed(p: Polynomial, labels: Sequence[str] | None = None) -> tuple[Polynomial, ProfileLayout]:
    """Lift a cube polynomial to n two-action simplices.

    Cube variable j becomes the first action of infoset j; second actions
    never appear.
    """
    layout = cube_layout(p.nvars, labels)
    return p.rename([2 * j for j in range(p.nvars)], layout.size, layout), layout


def cube_point(profile_values: Sequence) -> list:
    """First coordinate of every two-action block."""
    return [profile_values[2 * j] for j in range(len(profile_values) // 2)]


def cube_profile(x: Sequence) -> list:
    out = []
    for v in x:
        out += [v, 1 - v]
    return out
