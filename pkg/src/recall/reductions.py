"""Reduction instance generators and solution-correspondence checkers.

Literals are nonzero ints: ``+i`` is variable i (1-based) and ``-i`` its
negation, as in DIMACS files.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .bridge import cube_embed, poly_to_game
from .errors import fail
from .game import Game
from .poly import Polynomial
from .strategy import Profile, ProfileLayout


@dataclass(frozen=True)
class WeightedGraph:
    n: int
    edges: tuple  # (u, v, w) with 0-based vertices

    def __post_init__(self):
        for u, v, w in self.edges:
            if u == v:
                fail("MALFORMED", f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                fail("MALFORMED", f"edge ({u}, {v}) leaves the vertex range")
            if int(w) != w or w < 1:
                fail("MALFORMED", f"edge weight {w} is not a positive integer")

    @property
    def total_weight(self) -> int:
        return sum(w for _, _, w in self.edges)

    def cut_weight(self, z: Sequence[int]) -> int:
        return sum(w for u, v, w in self.edges if z[u] != z[v])


@dataclass(frozen=True)
class DnfFormula:
    """Disjunction of conjunctive clauses over ``n`` variables."""

    n: int
    clauses: tuple  # tuples of literals

    def __post_init__(self):
        for c in self.clauses:
            for lit in c:
                if lit == 0 or abs(lit) > self.n:
                    fail("MALFORMED", f"literal {lit} out of range for {self.n} variables")

    def satisfied(self, clause, assignment: Sequence[bool]) -> bool:
        return all(assignment[abs(l) - 1] == (l > 0) for l in clause)

    def count(self, assignment: Sequence[bool]) -> int:
        return sum(self.satisfied(c, assignment) for c in self.clauses)


TwoDnfFormula = DnfFormula


@dataclass
class ReductionInstance:
    kind: str
    game: Game
    eps: Fraction
    polynomial: Polynomial | None = None
    threshold: Fraction | None = None
    constants: dict = field(default_factory=dict)
    source: object = None

    def to_json(self) -> dict:
        from .report import jsonable

        return jsonable(
            {
                "kind": self.kind,
                "eps": self.eps,
                "threshold": self.threshold,
                "constants": self.constants,
                "game": self.game.to_json(),
            }
        )


# MaxCut and the FLIP neighbourhood


def maxcut_polynomial(graph: WeightedGraph) -> tuple[Polynomial, dict]:
    n = graph.n
    W = graph.total_weight
    Wp = 2 * (W + 1)
    x = [Polynomial.variable(n, v) for v in range(n)]
    half = Fraction(1, 2)
    p = Polynomial.zero(n)
    for v in range(n):
        p = p + ((x[v] - half) ** 2).scale(Wp)
    for t, v, w in graph.edges:
        d = x[t] * (1 - x[v]) + (1 - x[t]) * x[v]
        p = p + d.scale(w)
    return p, {"W": W, "W_prime": Wp}


def maxcut_to_cube_instance(graph: WeightedGraph) -> ReductionInstance:
    """Cube polynomial whose coordinatewise maxima are FLIP-local max cuts.

    On a bit vector z the polynomial equals ``W' n / 4 + cut(z)``.
    """
    if not graph.edges:
        fail("EMPTY_GRAPH", "graph has no edges")
    p, consts = maxcut_polynomial(graph)
    L = 15 * consts["W"]
    eps = Fraction(1, 2 * L + 2)
    lifted, layout = cube_embed(p)
    game = poly_to_game([lifted], layout)
    game.meta["reduction"] = "maxcut"
    consts.update({"L_inf": L, "n": graph.n})
    return ReductionInstance("maxcut", game, eps, p, None, consts, graph)


def round_cube_solution(x: Sequence, eps) -> list[int]:
    eps = Fraction(eps) if not isinstance(eps, float) else eps
    z = []
    for j, xv in enumerate(x):
        if xv <= eps:
            z.append(0)
        elif xv >= 1 - eps:
            z.append(1)
        else:
            fail("NOT_INTEGRAL", f"coordinate {j} = {xv} is not within eps of 0 or 1")
    return z


@dataclass(frozen=True)
class FlipCheck:
    passed: bool
    cut: int
    improving_vertex: int | None
    improved_cut: int | None

    def __bool__(self) -> bool:
        return self.passed


def check_flip_local_max(graph: WeightedGraph, partition: Sequence[int]) -> FlipCheck:
    z = [int(b) for b in partition]
    base = graph.cut_weight(z)
    for v in range(graph.n):
        z[v] ^= 1
        c = graph.cut_weight(z)
        z[v] ^= 1
        if c > base:
            return FlipCheck(False, base, v, c)
    return FlipCheck(True, base, None, None)


# 2-DNF-MaxSAT as a single-infoset game


def pad_two_dnf(formula: DnfFormula) -> DnfFormula:
    """Clauses over exactly two distinct variables.

    ``x & ~x`` can never hold and is dropped; ``x & x`` collapses to ``x``;
    a one-literal clause ``l`` becomes ``l & ~y`` for a fresh variable y, so
    assignments with every fresh variable false keep their counts.
    """
    n = formula.n
    out = []
    for c in formula.clauses:
        lits = sorted(set(c), key=lambda l: (abs(l), l))
        if len({abs(l) for l in lits}) < len(lits):
            continue
        if len(lits) == 1:
            n += 1
            lits = [lits[0], -n]
        if len(lits) != 2:
            fail("MALFORMED", f"clause {c} is not a 2-DNF clause")
        out.append(tuple(lits))
    return DnfFormula(n, tuple(out))


def minsat_payoff(formula: DnfFormula, i: int, v: bool, j: int, w: bool) -> int:
    """Clauses on exactly variables {i, j} made true by x_i = v, x_j = w."""
    got = 0
    for c in formula.clauses:
        vs = {abs(l) - 1 for l in c}
        if vs != {i, j}:
            continue
        val = {i: v, j: w}
        if all(val[abs(l) - 1] == (l > 0) for l in c):
            got += 1
    return got


def minsat_to_game(formula: DnfFormula, s_star: int) -> ReductionInstance:
    """One infoset with actions t1, f1, ..., tn, fn played twice."""
    phi = pad_two_dnf(formula)
    n, m = phi.n, len(phi.clauses)
    if n == 0:
        fail("MALFORMED", "formula has no variables")
    B = (16 * max(m, 1) * n * n) ** 3
    acts = [f"{tf}{i + 1}" for i in range(n) for tf in ("t", "f")]
    lits = [(i, tf == "t") for i in range(n) for tf in ("t", "f")]

    def dec(kids):
        return {"decision": {"player": 1, "infoset": "I", "actions": acts, "children": dict(zip(acts, kids))}}

    def leaf(a, b):
        (i, v), (j, w) = lits[a], lits[b]
        u = -B if i == j else minsat_payoff(phi, i, v, j, w)
        return {"terminal": {"payoffs": [str(u)]}}

    root = dec([dec([leaf(a, b) for b in range(2 * n)]) for a in range(2 * n)])
    game = Game.from_json({"players": 1, "infosets": [{"player": 1, "label": "I", "actions": acts}], "root": root, "meta": {"reduction": "minsat"}})
    t_star = Fraction(-B, n) + Fraction(2 * s_star, n * n)
    eps = Fraction(2, n * n) / 4
    return ReductionInstance("minsat", game, eps, None, t_star, {"B": B, "n": n, "m": m, "s_star": s_star}, phi)


def assignment_profile(game: Game, assignment: Sequence[bool]) -> Profile:
    """Probability 1/n on the action matching each variable's value."""
    n = len(assignment)
    vals = []
    for v in assignment:
        vals += [Fraction(1, n), Fraction(0)] if v else [Fraction(0), Fraction(1, n)]
    return Profile(game.layout, vals)


def brute_force_max_sat(formula: DnfFormula) -> int:
    return max(formula.count(a) for a in itertools.product([False, True], repeat=formula.n))


# exists-forall 3-DNF as an EDT-existence instance


def _literal_poly(lit: int, nx: int, x_vars, y_vars, scale_x: int, scale_y: int, nv: int) -> Polynomial:
    i = abs(lit) - 1
    if i < nx:
        var = Polynomial.variable(nv, x_vars[i]).scale(scale_x)
    else:
        var = Polynomial.variable(nv, y_vars[i - nx]).scale(scale_y)
    return var if lit > 0 else 1 - var


def _psi(vars_: Sequence[int], scale: int, nv: int) -> Polynomial:
    out = Polynomial.zero(nv)
    for v in vars_:
        s = Polynomial.variable(nv, v).scale(scale)
        out = out + (s**2) * ((1 - s) ** 2)
    return out


@dataclass
class ForallData:
    nx: int
    ny: int
    clauses: tuple  # the augmented formula over x_1..x_m, y_1..y_n
    m: int
    n: int
    k: int


def dnf_forall_to_edt_instance(clauses: Iterable[Sequence[int]], nx: int, ny: int) -> ReductionInstance:
    """Two-player zero-sum game with one infoset each.

    Variables 1..nx are the existential x, nx+1..nx+ny the universal y.  The
    formula is augmented with x_m & ~y_n and ~x_m & y_n for fresh x_m, y_n;
    P1 plays a point of the (m+1)-simplex, P2 of the (n+2)-simplex.
    Repeated literals are merged and self-contradictory clauses dropped
    before taking the multilinear form.
    """
    src = DnfFormula(nx + ny, tuple(tuple(c) for c in clauses))
    m, n = nx + 1, ny + 1
    # renumber: x_1..x_m are 1..m, y_1..y_n are m+1..m+n
    ren = []
    for c in src.clauses:
        lits = set()
        for l in c:
            i = abs(l)
            j = i if i <= nx else i - nx + m
            lits.add(j if l > 0 else -j)
        if any(-l in lits for l in lits):
            continue
        ren.append(tuple(sorted(lits, key=abs)))
    ren.append((m, -(m + n)))
    ren.append((-m, m + n))
    k = len(src.clauses) + 2
    layout = ProfileLayout.build(2, [(0, "X", [f"x{i + 1}" for i in range(m + 1)]), (1, "Y", [f"y{i + 1}" for i in range(n + 2)])])
    nv = layout.size
    xv = list(range(m + 1))
    yv = list(range(m + 1, nv))
    phi = Polynomial.zero(nv)
    for c in ren:
        term = Polynomial.constant(nv, 1)
        for l in c:
            term = term * _literal_poly(l, m, xv, yv, m, n, nv)
        phi = phi + term
    R = k * max(m, n) ** 3
    eps = Fraction(1, 28 * k) ** 2
    L = 8 * R / eps
    y_extra = Polynomial.variable(nv, yv[n + 1])
    u1 = (1 - y_extra) * (phi - Fraction(1, 2)) - _psi(xv[:m], m, nv).scale(L) + _psi(yv[:n], n, nv).scale(L)
    u1 = Polynomial(nv, u1.terms, layout)
    game = poly_to_game([u1, -u1], layout)
    game.meta["reduction"] = "dnf-forall"
    data = ForallData(nx, ny, tuple(ren), m, n, k)
    return ReductionInstance("dnf-forall", game, eps, u1, None, {"R": R, "L": L, "m": m, "n": n, "k": k}, data)


def forall_witness(clauses: Iterable[Sequence[int]], nx: int, ny: int) -> list[int] | None:
    """An x in {0,1}^nx with phi(x, y) true for every y, by brute force."""
    f = DnfFormula(nx + ny, tuple(tuple(c) for c in clauses))
    for xs in itertools.product([False, True], repeat=nx):
        if all(f.count(list(xs) + list(ys)) >= 1 for ys in itertools.product([False, True], repeat=ny)):
            return [int(b) for b in xs]
    return None


def claim_profile(inst: ReductionInstance, x_tilde: Sequence[int]) -> Profile:
    """x* = (x~/m, 1 - |x~|/m) against y* = e_{n+2}.

    ``x_tilde`` may omit the extra coordinate x_m, which is then 0.
    """
    d: ForallData = inst.source
    xt = list(x_tilde) + [0] * (d.m - len(x_tilde))
    x = [Fraction(b, d.m) for b in xt]
    x.append(1 - sum(x))
    y = [Fraction(0)] * (d.n + 1) + [Fraction(1)]
    return Profile(inst.game.layout, x + y)


# text formats


def parse_edge_list(text: str) -> WeightedGraph:
    """Lines ``u v [w]`` with 1-based vertices; ``#`` starts a comment."""
    edges = []
    n = 0
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            fail("MALFORMED", f"line {ln}: expected 'u v [w]'")
        try:
            u, v = int(parts[0]), int(parts[1])
            w = int(parts[2]) if len(parts) == 3 else 1
        except ValueError:
            fail("MALFORMED", f"line {ln}: non-integer field")
        if u < 1 or v < 1:
            fail("MALFORMED", f"line {ln}: vertices are 1-based")
        n = max(n, u, v)
        edges.append((u - 1, v - 1, w))
    return WeightedGraph(n, tuple(edges))


def parse_clauses(text: str) -> tuple[list[tuple[int, ...]], dict]:
    """DIMACS-like clause lines terminated by 0.

    Header ``p dnf <vars> <clauses>`` or ``p forall <nx> <ny>``; ``c``
    lines are comments.
    """
    header: dict = {}
    clauses = []
    cur: list[int] = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4:
                fail("MALFORMED", f"line {ln}: bad header")
            header = {"kind": parts[1], "a": int(parts[2]), "b": int(parts[3])}
            continue
        try:
            nums = [int(t) for t in line.split()]
        except ValueError:
            fail("MALFORMED", f"line {ln}: non-integer literal")
        for x in nums:
            if x == 0:
                if cur:
                    clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(x)
    if cur:
        clauses.append(tuple(cur))
    return clauses, header
