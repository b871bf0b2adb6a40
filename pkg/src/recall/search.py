"""Certified search over simplices.

Two tools:

* uniform simplex grids with denominator ``N`` plus the covering radius that
  turns a grid optimum into a global bound, and
* a simplicial branch and bound that maximizes a polynomial over one simplex
  to a requested tolerance.

Lipschitz constants are coefficient sums of partial derivatives, i.e. bounds
on the gradient's sup-norm, so they pair with l1 distances.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import fail
from .poly import Compiled, Polynomial

MAX_GRID_CELLS = 40_000_000
MAX_BB_CELLS = 600_000
TENSOR_CHUNKS = 16


def solver_threads() -> int:
    raw = os.environ.get("RECALL_SOLVER_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def grid_count(m: int, N: int) -> int:
    return math.comb(N + m - 1, m - 1)


def simplex_grid(m: int, N: int) -> np.ndarray:
    """Integer numerators of every point of the grid ``{k / N : sum k = N}``.

    Rows are in lexicographic order of ``(k_0, ..., k_{m-1})``.
    """
    if grid_count(m, N) > MAX_GRID_CELLS:
        fail("DIMENSION_TOO_LARGE", f"simplex grid with m={m}, N={N} is too large")
    if m == 1:
        return np.array([[N]], dtype=np.int64)
    if m == 2:
        k = np.arange(N + 1, dtype=np.int64)
        return np.stack([k, N - k], axis=1)
    rows = []
    for k0 in range(N + 1):
        sub = simplex_grid(m - 1, N - k0)
        rows.append(np.concatenate([np.full((len(sub), 1), k0, dtype=np.int64), sub], axis=1))
    return np.concatenate(rows, axis=0)


def vertices(m: int) -> np.ndarray:
    return np.eye(m, dtype=np.int64)


def covering_radius(m: int, N: int) -> Fraction:
    """Bound on the l1 distance from any simplex point to the nearest grid point.

    For two actions the grid is an interval mesh of width 1/N, giving 1/N.
    In general rounding every coordinate to a neighbouring multiple of 1/N
    while keeping the sum (largest-remainder rounding) moves each coordinate
    by less than 1/N, and the positive and negative moves balance, so the l1
    move is at most ``2 * floor(m/2) / N``.
    """
    if m <= 1:
        return Fraction(0)
    if m == 2:
        return Fraction(1, N)
    return Fraction(2 * (m // 2), N)


def denominator_for(radius_coef: Fraction, tol: Fraction) -> int:
    """Smallest N with ``radius_coef / N <= tol``."""
    if tol <= 0:
        fail("NONPOSITIVE_EPS", "tolerance must be positive")
    return max(1, math.ceil(Fraction(radius_coef) / Fraction(tol)))


def radius_coef(m: int) -> int:
    """``covering_radius(m, N) * N``."""
    if m <= 1:
        return 0
    if m == 2:
        return 1
    return 2 * (m // 2)


def to_fractions(row: Sequence[int], N: int) -> list[Fraction]:
    return [Fraction(int(k), N) for k in row]


# product-grid evaluation


def block_factors(poly_monos: list, axes_vars: Sequence[Sequence[int]], points: Sequence[np.ndarray]):
    """Per-axis monomial factors: ``F[a][t, q]`` is monomial t restricted to
    axis a's variables, evaluated at point q of that axis."""
    out = []
    for vars_, pts in zip(axes_vars, points):
        pos = {v: k for k, v in enumerate(vars_)}
        E = np.zeros((len(poly_monos), len(vars_)), dtype=np.int64)
        for t, mono in enumerate(poly_monos):
            for v, e in mono:
                if v in pos:
                    E[t, pos[v]] = e
        used = np.nonzero(E.any(axis=0))[0]
        if len(used) == 0:
            out.append(np.ones((len(poly_monos), len(pts))))
            continue
        P = np.asarray(pts, dtype=float)[:, used]
        out.append(np.prod(P[None, :, :] ** E[:, None, used], axis=2))
    return out


def product_tensor(poly: Polynomial, axes_vars: Sequence[Sequence[int]], points: Sequence[np.ndarray], fixed: Sequence | None = None) -> np.ndarray:
    """Values of ``poly`` on the product of per-axis point sets.

    Variables outside every axis are fixed to ``fixed`` (a full point).
    The result has one dimension per axis.
    """
    monos = list(poly.terms) or [()]
    all_axis = {v for vs in axes_vars for v in vs}
    coef = np.zeros(len(monos))
    for t, mono in enumerate(monos):
        c = float(poly.terms.get(mono, 0))
        for v, e in mono:
            if v not in all_axis:
                if fixed is None:
                    fail("LENGTH_MISMATCH", "variables outside the axes need fixed values")
                c *= float(fixed[v]) ** e
        coef[t] = c
    F = block_factors(monos, axes_vars, points)
    shape = tuple(len(p) for p in points)
    if not F:
        return np.array(coef.sum())
    letters = "abcdefghijklmnopqrsuvwxyz"
    spec = "t," + ",".join(f"t{letters[a]}" for a in range(len(F))) + "->" + letters[: len(F)]
    n0 = shape[0]
    if np.prod(shape) < 1_000_000:
        return np.einsum(spec, coef, *F, optimize=True)
    # chunking is fixed so results do not depend on the thread count
    chunks = np.array_split(np.arange(n0), min(n0, TENSOR_CHUNKS))

    def work(idx):
        return np.einsum(spec, coef, F[0][:, idx], *F[1:], optimize=True)

    with ThreadPoolExecutor(max_workers=solver_threads()) as ex:
        parts = list(ex.map(work, chunks))
    return np.concatenate(parts, axis=0)


# branch and bound on one simplex


@dataclass
class BlockMax:
    point: np.ndarray  # float coordinates of the best point found
    value: float  # its float value
    upper: float  # certified upper bound on the maximum
    cells: int
    exact_vertex: bool = False

    @property
    def bar(self) -> float:
        return max(0.0, self.upper - self.value)


class _BlockModel:
    """Float model of a polynomial on one simplex with derivative bounds."""

    def __init__(self, q: Polynomial):
        m = q.nvars
        self.m = m
        self.q = q
        self.grad = [q.partial(j) for j in range(m)]
        self.hess = [[self.grad[j].partial(k) for k in range(m)] for j in range(m)]
        self.cq = Compiled([q], m)
        self.cg = Compiled(self.grad, m)
        flat = [self.hess[j][k] for j in range(m) for k in range(m)]
        self.ch = Compiled(flat, m)
        self.linear = all(h.is_zero() for row in self.hess for h in row)
        self.coef_scale = float(q.abs_coef_sum()) + 1.0

    def value(self, X):
        return self.cq(X)[..., 0]

    def upper_bounds(self, V: np.ndarray):
        """Upper bound of the polynomial over each simplicial cell ``V[c]``."""
        C = V.mean(axis=1)
        qc = self.value(C)
        g = self.cg(C)
        D = V - C[:, None, :]
        ext = np.abs(D).max(axis=1)  # per-coordinate reach
        lo = V.min(axis=1)
        hi = V.max(axis=1)
        r1 = np.abs(D).sum(axis=2).max(axis=1)
        # first-order term: d sums to zero, so shift the gradient by its midrange
        mid = 0.5 * (g.max(axis=1) + g.min(axis=1))
        lin = np.minimum((np.abs(g - mid[:, None]) * ext).sum(axis=1), 0.5 * (g.max(axis=1) - g.min(axis=1)) * r1)
        m = self.m
        hu = self.ch.upper(lo, hi).reshape(-1, m, m)
        hl = self.ch.lower(lo, hi).reshape(-1, m, m)
        habs = np.maximum(np.abs(hu), np.abs(hl))
        diag = np.clip(np.einsum("cjj->cj", hu), 0, None)
        habs_off = habs.copy()
        idx = np.arange(m)
        habs_off[:, idx, idx] = 0
        quad = 0.5 * ((diag * ext**2).sum(axis=1) + np.einsum("cj,cjk,ck->c", ext, habs_off, ext))
        quad = np.minimum(quad, 0.5 * habs.max(axis=(1, 2)) * r1**2)
        slack = 1e-12 * (1.0 + self.cq.abs_values(C)[..., 0])
        return C, qc, qc + lin + quad + slack


def maximize_on_simplex(q: Polynomial, tol: float, seeds: Sequence[Sequence[float]] = (), max_cells: int = MAX_BB_CELLS) -> BlockMax:
    """Maximize ``q`` (a polynomial in the m simplex coordinates) to within ``tol``."""
    model = _BlockModel(q)
    m = model.m
    pts = [np.eye(m)[k] for k in range(m)] + [np.asarray(s, dtype=float) for s in seeds]
    P = np.array(pts)
    vals = model.value(P)
    b = int(np.argmax(vals))
    best_x, best = P[b].copy(), float(vals[b])
    if m == 1 or model.linear:
        return BlockMax(best_x, best, best + 1e-12 * model.coef_scale, len(P), exact_vertex=True)
    tol_eff = max(float(tol), 2e-12 * model.coef_scale)
    cells = np.eye(m)[None, :, :]
    pruned_upper = -np.inf
    evaluated = len(P)
    while len(cells):
        C, qc, ub = model.upper_bounds(cells)
        evaluated += len(cells)
        k = int(np.argmax(qc))
        if qc[k] > best:
            best, best_x = float(qc[k]), C[k].copy()
        keep = ub > best + tol_eff
        if (~keep).any():
            pruned_upper = max(pruned_upper, float(ub[~keep].max()))
        cells = cells[keep]
        ubk = ub[keep]
        if not len(cells):
            break
        if evaluated + 2 * len(cells) > max_cells:
            pruned_upper = max(pruned_upper, float(ubk.max()))
            break
        cells = _bisect(cells)
    return BlockMax(best_x, best, max(best, pruned_upper), evaluated)


def _bisect(cells: np.ndarray) -> np.ndarray:
    """Split each cell at the midpoint of its longest edge."""
    K, m, _ = cells.shape
    diff = cells[:, :, None, :] - cells[:, None, :, :]
    lens = (diff**2).sum(axis=3)
    flat = lens.reshape(K, -1).argmax(axis=1)
    a, b = np.divmod(flat, m)
    mid = 0.5 * (cells[np.arange(K), a] + cells[np.arange(K), b])
    left = cells.copy()
    right = cells.copy()
    left[np.arange(K), a] = mid
    right[np.arange(K), b] = mid
    return np.concatenate([left, right], axis=0)


def rationalize(point: Sequence[float], max_den: int = 1 << 40) -> list[Fraction]:
    """Nearby exact distribution (entries nonnegative, summing to one)."""
    fr = [max(Fraction(0), Fraction(float(x)).limit_denominator(max_den)) for x in point]
    s = sum(fr)
    if s == 0:
        fr = [Fraction(1, len(fr))] * len(fr)
        return fr
    fr = [x / s for x in fr]
    return fr


def enumerate_pure(sizes: Sequence[int]):
    return itertools.product(*[range(s) for s in sizes])
