"""Equilibrium computation for extensive-form games with imperfect recall."""

from .cdt import (
    advantage,
    bound_params,
    brouwer_map,
    cdt_utility,
    gradient_two_ways,
    solve_cdt_fixed_point,
    solve_cdt_pgd_single_player,
)
from .edt import certified_best_response, edt_deviation_utility, edt_dynamics
from .errors import RecallError
from .game import Game, degree_of_absentmindedness, expected_utility, has_perfect_recall, load_game, validate
from .nash import grid_edt_search, grid_nash_search, maxmin_minmax, nash_gap
from .poly import Polynomial, game_lipschitz
from .report import EquilibriumReport
from .strategy import Profile, ProfileLayout, pure_profile, random_profile, uniform_profile
from .verify import kkt_residual, verify_cdt, verify_cdt_well_supported, verify_edt, verify_nash

__all__ = [
    "EquilibriumReport",
    "Game",
    "Polynomial",
    "Profile",
    "ProfileLayout",
    "RecallError",
    "advantage",
    "bound_params",
    "brouwer_map",
    "cdt_utility",
    "certified_best_response",
    "degree_of_absentmindedness",
    "edt_deviation_utility",
    "edt_dynamics",
    "expected_utility",
    "game_lipschitz",
    "gradient_two_ways",
    "grid_edt_search",
    "grid_nash_search",
    "has_perfect_recall",
    "kkt_residual",
    "load_game",
    "maxmin_minmax",
    "nash_gap",
    "pure_profile",
    "random_profile",
    "solve_cdt_fixed_point",
    "solve_cdt_pgd_single_player",
    "uniform_profile",
    "validate",
    "verify_cdt",
    "verify_cdt_well_supported",
    "verify_edt",
    "verify_nash",
]
