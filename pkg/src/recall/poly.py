"""Sparse multivariate polynomials with exact rational coefficients.

A monomial is a sorted tuple of ``(variable, exponent)`` pairs holding only
positive exponents, so the constant monomial is ``()``.  Variables are the
flat indices of a :class:`recall.strategy.ProfileLayout`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import fail

Monomial = tuple[tuple[int, int], ...]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"not a rational: {x!r}")


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


class Polynomial:
    """Immutable sparse polynomial in ``nvars`` variables."""

    __slots__ = ("nvars", "layout", "terms", "_compiled", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Monomial, object] | Iterable = (), layout=None):
        self.nvars = int(nvars)
        self.layout = layout
        clean: dict[Monomial, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for mono, c in items:
            mono = tuple(sorted((int(v), int(e)) for v, e in mono if e))
            for v, e in mono:
                if not 0 <= v < self.nvars:
                    fail("VAR_OUT_OF_RANGE", f"variable {v} not in [0, {self.nvars})")
                if e < 0:
                    raise ValueError("negative exponent")
            c = _frac(c)
            if c:
                total = clean.get(mono, Fraction(0)) + c
                if total:
                    clean[mono] = total
                else:
                    clean.pop(mono, None)
        self.terms: dict[Monomial, Fraction] = dict(sorted(clean.items()))
        self._compiled = None
        self._hash = None

    # construction helpers
    @classmethod
    def zero(cls, nvars: int, layout=None) -> "Polynomial":
        return cls(nvars, {}, layout)

    @classmethod
    def constant(cls, nvars: int, c, layout=None) -> "Polynomial":
        return cls(nvars, {(): c}, layout)

    @classmethod
    def variable(cls, nvars: int, v: int, layout=None) -> "Polynomial":
        return cls(nvars, {((v, 1),): 1}, layout)

    def _like(self, terms) -> "Polynomial":
        return Polynomial(self.nvars, terms, self.layout)

    # basic properties
    @property
    def degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({(): Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, tuple(self.terms.items())))
        return self._hash

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self.terms.items():
            vs = "*".join(f"x{v}" + (f"^{e}" if e > 1 else "") for v, e in mono)
            parts.append(f"{c}" + (f"*{vs}" if vs else ""))
        return " + ".join(parts)

    # ring operations
    def _check(self, other: "Polynomial") -> None:
        if other.nvars != self.nvars:
            fail("LAYOUT_MISMATCH", f"{self.nvars} vs {other.nvars} variables")
        if self.layout is not None and other.layout is not None and self.layout != other.layout:
            fail("LAYOUT_MISMATCH", "polynomials live on different layouts")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(self.nvars, _frac(other), self.layout)

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return self._like(out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return self._like({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def scale(self, s) -> "Polynomial":
        s = _frac(s)
        return self._like({m: c * s for m, c in self.terms.items()})

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return self._like(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(self.nvars, 1, self.layout)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # calculus
    def partial(self, v: int) -> "Polynomial":
        if not 0 <= v < self.nvars:
            fail("VAR_OUT_OF_RANGE", f"variable {v} not in [0, {self.nvars})")
        out: dict[Monomial, Fraction] = {}
        for mono, c in self.terms.items():
            d = dict(mono)
            e = d.get(v, 0)
            if not e:
                continue
            if e == 1:
                del d[v]
            else:
                d[v] = e - 1
            m = tuple(sorted(d.items()))
            out[m] = out.get(m, Fraction(0)) + c * e
        return self._like(out)

    def abs_coef_sum(self) -> Fraction:
        return sum((abs(c) for c in self.terms.values()), Fraction(0))

    def variables(self) -> set[int]:
        return {v for mono in self.terms for v, _ in mono}

    def degree_in(self, vars_: Iterable[int]) -> int:
        """Largest total degree of any monomial restricted to ``vars_``."""
        s = set(vars_)
        return max((sum(e for v, e in m if v in s) for m in self.terms), default=0)

    # evaluation
    def evaluate(self, point: Sequence):
        """Value at ``point``; exact when every coordinate is rational."""
        if len(point) != self.nvars:
            fail("LENGTH_MISMATCH", f"point has {len(point)} coordinates, expected {self.nvars}")
        exact = all(isinstance(x, (int, Fraction)) for x in point)
        total = Fraction(0) if exact else 0.0
        for mono, c in self.terms.items():
            t = c if exact else float(c)
            for v, e in mono:
                t *= point[v] ** e
            total += t
        return total

    __call__ = evaluate

    def compiled(self) -> "Compiled":
        if self._compiled is None:
            self._compiled = Compiled([self], self.nvars)
        return self._compiled

    def evaluate_many(self, points) -> np.ndarray:
        """Float values at each row of ``points``."""
        return self.compiled()(np.asarray(points, dtype=float))[..., 0]

    def substitute(self, values: Mapping[int, object]) -> "Polynomial":
        """Fix the variables in ``values``; the rest keep their indices."""
        out: dict[Monomial, object] = {}
        for mono, c in self.terms.items():
            factor = c
            rest = []
            for v, e in mono:
                if v in values:
                    factor = factor * _frac(values[v]) ** e
                else:
                    rest.append((v, e))
            m = tuple(rest)
            out[m] = out.get(m, Fraction(0)) + factor
        return self._like(out)

    def restrict(self, vars_: Sequence[int], values: Sequence | None = None) -> "Polynomial":
        """Polynomial in ``len(vars_)`` new variables.

        Variables outside ``vars_`` are fixed to ``values`` (a full point);
        variable ``vars_[k]`` becomes new variable ``k``.
        """
        pos = {v: k for k, v in enumerate(vars_)}
        out: dict[Monomial, Fraction] = {}
        for mono, c in self.terms.items():
            factor = c
            rest = []
            for v, e in mono:
                if v in pos:
                    rest.append((pos[v], e))
                else:
                    if values is None:
                        fail("LENGTH_MISMATCH", "restriction needs values for the fixed variables")
                    factor = factor * _frac(values[v]) ** e
            m = tuple(sorted(rest))
            out[m] = out.get(m, Fraction(0)) + factor
        return Polynomial(len(vars_), out)

    def rename(self, mapping: Sequence[int], nvars: int, layout=None) -> "Polynomial":
        """Move variable ``v`` to ``mapping[v]`` in an ``nvars``-variable ring."""
        return Polynomial(nvars, {tuple((mapping[v], e) for v, e in m): c for m, c in self.terms.items()}, layout)

    # serialization
    def to_json(self, names: Sequence[str] | None = None) -> list[dict]:
        out = []
        for mono, c in self.terms.items():
            exps = {(names[v] if names else str(v)): e for v, e in mono}
            out.append({"exps": exps, "coef": str(c)})
        return out

    @classmethod
    def from_json(cls, terms: list[dict], nvars: int, names: Sequence[str] | None = None, layout=None) -> "Polynomial":
        index = {n: k for k, n in enumerate(names)} if names else None
        parsed = []
        for t in terms:
            mono = []
            for key, e in t.get("exps", {}).items():
                if index is not None:
                    if key not in index:
                        fail("VAR_OUT_OF_RANGE", f"unknown variable {key!r}")
                    v = index[key]
                else:
                    v = int(key)
                mono.append((v, int(e)))
            parsed.append((tuple(mono), _frac(t["coef"])))
        return cls(nvars, parsed, layout)


class Compiled:
    """Dense float evaluator for a family of polynomials sharing variables."""

    def __init__(self, polys: Sequence[Polynomial], nvars: int):
        monos: dict[Monomial, int] = {}
        for p in polys:
            for m in p.terms:
                monos.setdefault(m, len(monos))
        if not monos:
            monos[()] = 0
        self.nvars = nvars
        self.monomials = list(monos)
        self.exps = np.zeros((len(monos), nvars), dtype=np.int64)
        for m, r in monos.items():
            for v, e in m:
                self.exps[r, v] = e
        self.coefs = np.zeros((len(monos), len(polys)))
        self.abs_coefs = np.zeros((len(monos), len(polys)))
        for k, p in enumerate(polys):
            for m, c in p.terms.items():
                self.coefs[monos[m], k] = float(c)
                self.abs_coefs[monos[m], k] = abs(float(c))
        self._used = [v for v in range(nvars) if self.exps[:, v].any()]
        self._sub = self.exps[:, self._used]

    def monomial_values(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        xs = x[..., self._used]
        if not self._used:
            return np.ones(x.shape[:-1] + (len(self.monomials),))
        return np.prod(xs[..., None, :] ** self._sub, axis=-1)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.monomial_values(x) @ self.coefs

    def abs_values(self, x: np.ndarray) -> np.ndarray:
        return self.monomial_values(x) @ self.abs_coefs

    def upper(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """Upper bounds over boxes ``[lo, hi]`` inside the nonnegative orthant."""
        pos = np.clip(self.coefs, 0, None)
        neg = np.clip(self.coefs, None, 0)
        return self.monomial_values(hi) @ pos + self.monomial_values(lo) @ neg

    def lower(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        pos = np.clip(self.coefs, 0, None)
        neg = np.clip(self.coefs, None, 0)
        return self.monomial_values(lo) @ pos + self.monomial_values(hi) @ neg


# functional interface


def evaluate(p: Polynomial, point: Sequence):
    return p.evaluate(point)


def partial_derivative(p: Polynomial, var: int) -> Polynomial:
    return p.partial(var)


def add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def scale(p: Polynomial, s) -> Polynomial:
    return p.scale(s)


def multiply(p: Polynomial, q) -> Polynomial:
    return p * q


@dataclass(frozen=True)
class PolyLipschitz:
    per_variable: tuple[Fraction, ...]
    l_inf: Fraction


def lipschitz_inf(p: Polynomial) -> PolyLipschitz:
    """Coefficient-sum bounds on each partial derivative over the unit cube.

    ``per_variable[j]`` bounds ``|d p / d x_j|`` on ``[0,1]^n``, so the
    variation of ``p`` between two cube points is at most
    ``sum_j per_variable[j] * |a_j - b_j|``, hence at most
    ``l_inf * ||a - b||_1``.
    """
    per = tuple(p.partial(j).abs_coef_sum() for j in range(p.nvars))
    return PolyLipschitz(per, max([Fraction(1), *per]))


@dataclass(frozen=True)
class LipschitzBundle:
    """Lipschitz data for a game's utility polynomials.

    ``per_variable[i][j]`` bounds the j-th partial of player i's utility.
    ``per_derivative[(i, v)]`` is the constant of the partial of player i's
    utility with respect to one of that player's own variables ``v``.
    """

    l_inf: Fraction
    per_variable: tuple[tuple[Fraction, ...], ...]
    per_derivative: dict
    per_player: tuple[Fraction, ...]

    def block_constant(self, player: int, vars_: Iterable[int]) -> Fraction:
        return max((self.per_variable[player][v] for v in vars_), default=Fraction(0))


def game_lipschitz(polys: Sequence[Polynomial], own_vars: Sequence[Sequence[int]] | None = None) -> LipschitzBundle:
    """Combined constant over every utility and every own-variable partial."""
    if polys:
        n = polys[0].nvars
        for q in polys:
            if q.nvars != n:
                fail("LAYOUT_MISMATCH", "utility polynomials disagree on variables")
    per_variable = []
    per_player = []
    per_derivative: dict = {}
    for i, p in enumerate(polys):
        lip = lipschitz_inf(p)
        per_variable.append(lip.per_variable)
        per_player.append(max(lip.per_variable, default=Fraction(0)))
        mine = range(p.nvars) if own_vars is None else own_vars[i]
        for v in mine:
            per_derivative[(i, v)] = max(lipschitz_inf(p.partial(v)).per_variable, default=Fraction(0))
    l_inf = max([Fraction(1), *per_player, *per_derivative.values()])
    return LipschitzBundle(l_inf, tuple(per_variable), per_derivative, tuple(per_player))
