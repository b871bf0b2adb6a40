"""Machine-readable solver and verifier reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .strategy import Profile

SOLVED = "SOLVED"
UNCONVERGED = "UNCONVERGED"
CERTIFIED_NO_EXACT_NASH = "CERTIFIED_NO_EXACT_NASH"
CERTIFIED_NO_EXACT_EDT = "CERTIFIED_NO_EXACT_EDT"


def jsonable(x):
    """Rationals become strings, floats stay floats, containers recurse."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, bool) or x is None or isinstance(x, (str, int)):
        return x
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return x
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, Profile):
        return x.to_json()
    if isinstance(x, np.ndarray):
        return [jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "to_json"):
        return x.to_json()
    return str(x)


@dataclass
class EquilibriumReport:
    concept: str
    status: str
    eps: object
    profile: Profile | None
    certificate: str = ""
    values: tuple = ()
    residuals: dict = field(default_factory=dict)
    iterations: int = 0
    provenance: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == SOLVED

    def to_json(self) -> dict:
        return jsonable(
            {
                "concept": self.concept,
                "status": self.status,
                "eps": self.eps,
                "certificate": self.certificate,
                "profile": self.profile,
                "values": list(self.values),
                "residuals": self.residuals,
                "iterations": self.iterations,
                "provenance": self.provenance,
                "extras": self.extras,
            }
        )


def game_provenance(game, **extra) -> dict:
    lip = game.lipschitz
    out = {
        "game_sha256": game.digest,
        "nodes": game.size,
        "players": game.num_players,
        "L_inf": lip.l_inf,
    }
    out.update(extra)
    return out
