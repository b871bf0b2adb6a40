"""Batch command-line interface; every command prints one JSON document."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from . import cdt, edt, nash, reductions, transforms, verify
from .bridge import extract_utility_polynomials, poly_to_game
from .errors import RecallError, fail
from .game import Game, parse_rational, validate
from .instances import build, catalog_names
from .poly import Polynomial
from .report import CERTIFIED_NO_EXACT_EDT, CERTIFIED_NO_EXACT_NASH, SOLVED, jsonable
from .strategy import Profile, ProfileLayout, random_profile

EXIT_OK = 0
EXIT_FAIL = 2
EXIT_UNCONVERGED = 3
EXIT_INPUT = 4


def _read_text(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        fail("UNREADABLE", str(exc))


def _read_json(path: str):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        fail("MALFORMED", f"{path}: {exc}")


def _load_game(path: str) -> Game:
    return Game.from_json(_read_json(path))


def _rational(text: str):
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError):
        fail("MALFORMED", f"not a rational number: {text!r}")


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(jsonable(doc), indent=2) + "\n")


def _status_code(status: str) -> int:
    if status == SOLVED:
        return EXIT_OK
    if status in (CERTIFIED_NO_EXACT_NASH, CERTIFIED_NO_EXACT_EDT):
        return EXIT_FAIL
    return EXIT_UNCONVERGED


# commands


def cmd_validate(args) -> int:
    issues = validate(_read_json(args.game))
    _emit({"valid": not issues, "issues": [i.to_json() for i in issues]})
    return EXIT_OK if not issues else EXIT_FAIL


def cmd_solve(args) -> int:
    game = _load_game(args.game)
    eps = _rational(args.eps)
    start = None
    if args.seed is not None:
        start = random_profile(game.layout, np.random.default_rng(args.seed))
    if args.concept == "nash":
        rep = nash.grid_nash_search(game, eps)
    elif args.concept == "edt":
        kw = {} if args.max_iter is None else {"max_rounds": args.max_iter}
        rep = edt.edt_dynamics(game, eps, start=start, **kw)
    elif args.concept == "cdt":
        kw = {} if args.max_iter is None else {"max_iter": args.max_iter}
        rep = cdt.solve_cdt_fixed_point(game, eps, start=start, **kw)
    else:
        rep = cdt.solve_cdt_pgd_single_player(game, eps, max_iter=args.max_iter, start=start)
    rep.provenance["seed"] = args.seed
    _emit(rep.to_json())
    return _status_code(rep.status)


def _load_profile(game: Game, path: str) -> Profile:
    doc = _read_json(path)
    if isinstance(doc, dict) and "profile" in doc:
        doc = doc["profile"]
    try:
        return Profile.from_json(game.layout, doc)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        fail("MALFORMED", f"bad profile: {exc}")


def cmd_verify(args) -> int:
    game = _load_game(args.game)
    eps = _rational(args.eps)
    prof = _load_profile(game, args.profile)
    if args.concept == "kkt":
        res = verify.kkt_residual(game, prof)
        passed = res.residual <= eps
        _emit({"concept": "kkt", "passed": passed, "eps": eps, **res.to_json()})
        return EXIT_OK if passed else EXIT_FAIL
    fn = {
        "cdt": verify.verify_cdt,
        "cdt-ws": verify.verify_cdt_well_supported,
        "edt": verify.verify_edt,
        "nash": verify.verify_nash,
    }[args.concept]
    res = fn(game, prof, eps)
    _emit(res.to_json())
    return EXIT_OK if res.passed else EXIT_FAIL


def cmd_gap(args) -> int:
    game = _load_game(args.game)
    rep = nash.maxmin_minmax(game, resolution=args.resolution)
    _emit({**rep.to_json(), "game": game.digest})
    return EXIT_OK


def _load_polys(doc) -> tuple[list[Polynomial], ProfileLayout]:
    try:
        layout = ProfileLayout.from_json(doc["layout"])
        bodies = doc["polynomials"] if "polynomials" in doc else [doc["terms"]]
    except (KeyError, TypeError) as exc:
        fail("MALFORMED", f"polynomial file needs 'layout' and 'terms': {exc}")
    names = layout.var_names()
    return [Polynomial.from_json(t, layout.size, names, layout) for t in bodies], layout


def cmd_transform(args) -> int:
    if args.op == "poly2game":
        polys, layout = _load_polys(_read_json(args.input))
        _emit(poly_to_game(polys, layout).to_json())
        return EXIT_OK
    game = _load_game(args.input)
    if args.op == "extract-poly":
        polys = extract_utility_polynomials(game)
        names = game.layout.var_names()
        doc = {"layout": game.layout.to_json(), "polynomials": [p.to_json(names) for p in polys]}
        if len(polys) == 1:
            doc["terms"] = doc["polynomials"][0]
        _emit(doc)
    elif args.op == "consolidate-chance":
        _emit(transforms.consolidate_chance(game).to_json())
    else:
        out, removal = transforms.remove_chance(game)
        doc = {"game": out.to_json(), "removal": removal.to_json()}
        if args.eps is not None:
            doc["precision"] = removal.precision(_rational(args.eps))
        _emit(doc)
    return EXIT_OK


def cmd_gen(args) -> int:
    text = _read_text(args.input)
    if args.kind == "maxcut":
        inst = reductions.maxcut_to_cube_instance(reductions.parse_edge_list(text))
    else:
        clauses, header = reductions.parse_clauses(text)
        if args.kind == "minsat":
            if args.sstar is None:
                fail("MALFORMED", "minsat needs --sstar")
            n = header.get("a") or max((abs(l) for c in clauses for l in c), default=0)
            inst = reductions.minsat_to_game(reductions.DnfFormula(n, tuple(clauses)), args.sstar)
        else:
            if header.get("kind") != "forall":
                fail("MALFORMED", "dnf-forall input needs a 'p forall <nx> <ny>' header")
            inst = reductions.dnf_forall_to_edt_instance(clauses, header["a"], header["b"])
    _emit(inst.to_json())
    return EXIT_OK


def cmd_catalog(args) -> int:
    if args.action == "list":
        _emit({"games": catalog_names()})
        return EXIT_OK
    if args.name is None:
        fail("MALFORMED", "catalog emit needs a game name")
    lam = None if args.lam is None else _rational(args.lam)
    _emit(build(args.name, lam=lam, n=args.n).to_json())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="recall", description="Solvers for games with imperfect recall.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check a game file")
    s.add_argument("game")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("solve", help="compute an approximate equilibrium")
    s.add_argument("--concept", required=True, choices=["cdt", "cdt-pgd", "edt", "nash"])
    s.add_argument("--eps", required=True)
    s.add_argument("--max-iter", type=int, default=None)
    s.add_argument("--seed", type=int, default=None, help="random rational start instead of uniform")
    s.add_argument("game")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("verify", help="check a profile against an equilibrium concept")
    s.add_argument("--concept", required=True, choices=["cdt", "cdt-ws", "edt", "nash", "kkt"])
    s.add_argument("--eps", required=True)
    s.add_argument("--profile", required=True)
    s.add_argument("game")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("gap", help="max-min, min-max and duality gap of a zero-sum game")
    s.add_argument("--resolution", type=int, default=None)
    s.add_argument("game")
    s.set_defaults(func=cmd_gap)

    s = sub.add_parser("transform", help="game and polynomial transformations")
    s.add_argument("op", choices=["extract-poly", "poly2game", "consolidate-chance", "remove-chance"])
    s.add_argument("input")
    s.add_argument("--eps", default=None)
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("gen", help="instances from the hardness reductions")
    s.add_argument("kind", choices=["maxcut", "minsat", "dnf-forall"])
    s.add_argument("input")
    s.add_argument("--sstar", type=int, default=None)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("catalog", help="built-in example games")
    s.add_argument("action", choices=["list", "emit"])
    s.add_argument("name", nargs="?")
    s.add_argument("--lambda", dest="lam", default=None)
    s.add_argument("--n", type=int, default=None)
    s.set_defaults(func=cmd_catalog)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except RecallError as exc:
        _emit({"error": exc.code, "message": exc.message})
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
