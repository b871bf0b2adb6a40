"""Behavioral strategy profiles on a product of simplices."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import fail

FLOAT_TOL = 1e-12


@dataclass(frozen=True)
class InfosetBlock:
    """One infoset's slice of the flat profile vector."""

    player: int
    index: int  # position among the player's infosets
    label: str
    actions: tuple[str, ...]
    offset: int

    @property
    def size(self) -> int:
        return len(self.actions)

    @property
    def vars(self) -> range:
        return range(self.offset, self.offset + len(self.actions))


@dataclass(frozen=True)
class ProfileLayout:
    """Flat indexing of every (player, infoset, action) triple.

    Blocks are ordered by player, then by the player's infoset order, so flat
    indices follow the lexicographic order of the triples.
    """

    num_players: int
    blocks: tuple[InfosetBlock, ...]

    @classmethod
    def build(cls, num_players: int, infosets: Sequence[tuple[int, str, Sequence[str]]]) -> "ProfileLayout":
        """``infosets`` lists ``(player, label, actions)`` with players grouped in order."""
        blocks = []
        offset = 0
        count = [0] * num_players
        ordered = sorted(enumerate(infosets), key=lambda t: (t[1][0], t[0]))
        for _, (player, label, actions) in ordered:
            blocks.append(InfosetBlock(player, count[player], label, tuple(actions), offset))
            count[player] += 1
            offset += len(actions)
        return cls(num_players, tuple(blocks))

    @property
    def size(self) -> int:
        return sum(b.size for b in self.blocks)

    def __len__(self) -> int:
        return self.size

    def player_blocks(self, player: int) -> list[int]:
        return [k for k, b in enumerate(self.blocks) if b.player == player]

    def player_vars(self, player: int) -> list[int]:
        return [v for k in self.player_blocks(player) for v in self.blocks[k].vars]

    def infoset_counts(self) -> list[int]:
        return [len(self.player_blocks(i)) for i in range(self.num_players)]

    def block_of_var(self) -> list[int]:
        return [k for k, b in enumerate(self.blocks) for _ in b.actions]

    def block_id(self, player: int, infoset) -> int:
        """Block index from a player and an infoset index or label."""
        for k, b in enumerate(self.blocks):
            if b.player == player and (b.index == infoset or b.label == infoset):
                return k
        fail("LAYOUT_MISMATCH", f"player {player} has no infoset {infoset!r}")

    def var(self, player: int, infoset, action) -> int:
        b = self.blocks[self.block_id(player, infoset)]
        k = b.actions.index(action) if isinstance(action, str) else int(action)
        if not 0 <= k < b.size:
            fail("LAYOUT_MISMATCH", f"action {action!r} not in infoset {b.label}")
        return b.offset + k

    def var_names(self) -> list[str]:
        return [f"P{b.player + 1}.{b.label}.{a}" for b in self.blocks for a in b.actions]

    def to_json(self) -> dict:
        return {
            "players": self.num_players,
            "infosets": [{"player": b.player + 1, "label": b.label, "actions": list(b.actions)} for b in self.blocks],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ProfileLayout":
        n = int(doc["players"])
        return cls.build(n, [(int(d["player"]) - 1, d["label"], d["actions"]) for d in doc.get("infosets", [])])


def _num(x):
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, np.integer):
        return Fraction(int(x))
    raise TypeError(f"bad profile entry {x!r}")


class Profile:
    """A point of the strategy space, exact (Fractions) or float."""

    __slots__ = ("layout", "values")

    def __init__(self, layout: ProfileLayout, values: Sequence, check: bool = True):
        vals = [_num(x) for x in values]
        if len(vals) != layout.size:
            fail("LENGTH_MISMATCH", f"profile has {len(vals)} entries, layout needs {layout.size}")
        if not all(isinstance(x, Fraction) for x in vals):
            vals = [float(x) for x in vals]
        self.layout = layout
        self.values = tuple(vals)
        if check:
            self._check()

    def _check(self) -> None:
        exact = self.exact
        fixed = list(self.values)
        for b in self.layout.blocks:
            blk = fixed[b.offset:b.offset + b.size]
            if any(x < (0 if exact else -FLOAT_TOL) for x in blk):
                fail("INVALID_PROFILE", f"negative probability in infoset {b.label}")
            s = sum(blk)
            if exact:
                if s != 1:
                    fail("INVALID_PROFILE", f"infoset {b.label} sums to {s}")
            else:
                if abs(s - 1) > 1e-9:
                    fail("INVALID_PROFILE", f"infoset {b.label} sums to {s}")
                if abs(s - 1) > FLOAT_TOL or min(blk) < 0:
                    blk = [max(x, 0.0) for x in blk]
                    s = sum(blk)
                    fixed[b.offset:b.offset + b.size] = [x / s for x in blk]
        self.values = tuple(fixed)

    @property
    def exact(self) -> bool:
        return all(isinstance(x, Fraction) for x in self.values)

    def block(self, k: int) -> tuple:
        b = self.layout.blocks[k]
        return self.values[b.offset:b.offset + b.size]

    def as_float(self) -> "Profile":
        return Profile(self.layout, [float(x) for x in self.values], check=False)

    def array(self) -> np.ndarray:
        return np.array([float(x) for x in self.values])

    def replace_block(self, k: int, alpha: Sequence) -> "Profile":
        b = self.layout.blocks[k]
        alpha = [_num(a) for a in alpha]
        if len(alpha) != b.size:
            fail("BLOCK_DIM_MISMATCH", f"infoset {b.label} has {b.size} actions, got {len(alpha)}")
        check_distribution(alpha, b.label)
        vals = list(self.values)
        vals[b.offset:b.offset + b.size] = alpha
        return Profile(self.layout, vals, check=False)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

    def __eq__(self, other) -> bool:
        if isinstance(other, Profile):
            return self.layout == other.layout and self.values == other.values
        return NotImplemented

    def __repr__(self) -> str:
        return f"Profile({[str(x) for x in self.values]})"

    def to_json(self) -> dict:
        nested: dict = {}
        for b in self.layout.blocks:
            nested.setdefault(f"P{b.player + 1}", {})[b.label] = {
                a: str(self.values[b.offset + k]) if isinstance(self.values[b.offset + k], Fraction) else self.values[b.offset + k]
                for k, a in enumerate(b.actions)
            }
        return {"values": [str(x) if isinstance(x, Fraction) else x for x in self.values], "by_infoset": nested}

    @classmethod
    def from_json(cls, layout: ProfileLayout, doc) -> "Profile":
        if isinstance(doc, dict) and "values" in doc:
            doc = doc["values"]
        if isinstance(doc, list):
            return cls(layout, [_parse_num(x) for x in doc])
        if isinstance(doc, dict):
            nested = doc.get("by_infoset", doc)
            vals = [None] * layout.size
            for b in layout.blocks:
                blk = nested[f"P{b.player + 1}"][b.label]
                for k, a in enumerate(b.actions):
                    vals[b.offset + k] = _parse_num(blk[a])
            return cls(layout, vals)
        fail("LENGTH_MISMATCH", "unrecognised profile document")


def _parse_num(x):
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int):
        return Fraction(x)
    return float(x)


def check_distribution(alpha: Sequence, label: str = "") -> None:
    exact = all(isinstance(a, (Fraction, int)) for a in alpha)
    if any(a < (0 if exact else -FLOAT_TOL) for a in alpha):
        fail("BLOCK_DIM_MISMATCH", f"negative entry in distribution for {label}")
    s = sum(alpha)
    if (s != 1) if exact else abs(s - 1) > 1e-9:
        fail("BLOCK_DIM_MISMATCH", f"distribution for {label} sums to {s}")


def as_profile(layout: ProfileLayout, profile) -> Profile:
    if isinstance(profile, Profile):
        if profile.layout != layout:
            fail("LAYOUT_MISMATCH", "profile belongs to a different layout")
        return profile
    vals = list(profile)
    if len(vals) != layout.size:
        fail("LAYOUT_MISMATCH", f"profile has {len(vals)} entries, layout needs {layout.size}")
    return Profile(layout, vals)


def uniform_profile(layout: ProfileLayout) -> Profile:
    return Profile(layout, [Fraction(1, b.size) for b in layout.blocks for _ in b.actions])


def pure_profile(layout: ProfileLayout, choice: Sequence[int]) -> Profile:
    """Vertex profile playing action ``choice[k]`` at block ``k``."""
    vals = []
    for b, c in zip(layout.blocks, choice):
        vals += [Fraction(int(i == c)) for i in range(b.size)]
    return Profile(layout, vals)


def with_infoset_action(profile: Profile, player: int, infoset, alpha: Sequence) -> Profile:
    k = profile.layout.block_id(player, infoset)
    return profile.replace_block(k, alpha)


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of ``v`` onto the probability simplex (sort based)."""
    v = np.asarray(v, dtype=float)
    if v.size == 1:
        return np.ones(1)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(v - theta, 0.0)


def project_to_simplex_product(vector: Sequence[float], layout: ProfileLayout) -> Profile:
    vec = np.asarray(vector, dtype=float)
    if vec.shape != (layout.size,):
        fail("LENGTH_MISMATCH", f"vector has {vec.size} entries, layout needs {layout.size}")
    out = np.empty_like(vec)
    for b in layout.blocks:
        sl = slice(b.offset, b.offset + b.size)
        out[sl] = project_simplex(vec[sl])
    return Profile(layout, out.tolist())


def linf_distance(p: Profile, q: Profile):
    if p.layout != q.layout:
        fail("LAYOUT_MISMATCH", "profiles on different layouts")
    return max((abs(a - b) for a, b in zip(p.values, q.values)), default=Fraction(0))


def random_profile(layout: ProfileLayout, rng, exact: bool = True, denominator: int = 60) -> Profile:
    """Random interior-or-boundary profile; rational with bounded denominators."""
    vals = []
    for b in layout.blocks:
        if exact:
            w = [int(x) for x in rng.integers(0, denominator, size=b.size)]
            if sum(w) == 0:
                w[int(rng.integers(0, b.size))] = 1
            s = sum(w)
            vals += [Fraction(x, s) for x in w]
        else:
            w = rng.dirichlet(np.ones(b.size))
            vals += list(w)
    return Profile(layout, vals)
