"""Fractional allocations and a projected-subgradient solver for the
Lovász-extension relaxation."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import CapabilityError, FeasibilityError, ParameterError
from .setfunc import Instance, lovasz_extension

FEAS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class FractionalAllocation:
    """Row-stochastic n x k matrix with terminal rows pinned to unit vectors."""

    x: np.ndarray
    instance: Instance

    def __post_init__(self):
        x = np.array(self.x, dtype=np.float64)
        x.setflags(write=False)
        object.__setattr__(self, "x", x)
        problem = feasibility_violation(x, self.instance)
        if problem is not None:
            raise FeasibilityError(problem)

    @property
    def n(self):
        return self.x.shape[0]

    @property
    def k(self):
        return self.x.shape[1]

    def column(self, i):
        return self.x[:, i]


def feasibility_violation(x, instance: Instance, tol: float = FEAS_TOL):
    """Description of the first violated constraint, or None."""
    n, k = instance.n, instance.k
    if x.shape != (n, k):
        return f"allocation has shape {x.shape}, expected ({n}, {k})"
    if not np.all(np.isfinite(x)):
        return "allocation has non-finite entries"
    bad = np.argwhere((x < 0.0) | (x > 1.0))
    if bad.size:
        v, i = bad[0]
        return f"x[{v}, {i}] = {x[v, i]!r} is outside [0, 1]"
    sums = x.sum(axis=1)
    off = np.nonzero(np.abs(sums - 1.0) > tol)[0]
    if off.size:
        return f"row {off[0]} sums to {sums[off[0]]!r}, not 1"
    for i, s in enumerate(instance.terminals):
        if x[s, i] != 1.0:
            return f"terminal row {s} has x[{s}, {i}] = {x[s, i]!r}, not 1"
    return None


def terminal_allocation(instance: Instance, free_rows=None) -> np.ndarray:
    """Matrix with terminal rows pinned and free rows uniform (or given)."""
    x = np.full((instance.n, instance.k), 1.0 / instance.k)
    if free_rows is not None:
        x[list(instance.free)] = free_rows
    for i, s in enumerate(instance.terminals):
        x[s] = 0.0
        x[s, i] = 1.0
    return x


def objective(x: FractionalAllocation) -> float:
    f = x.instance.oracle
    return sum(lovasz_extension(f, x.x[:, i]) for i in range(x.k))


def project_row(v, pinned=None) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if pinned is not None:
        e = np.zeros(v.shape[0])
        e[pinned] = 1.0
        return e
    return project_rows(v[None, :])[0]


def project_rows(V: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row onto the probability simplex (sort-based)."""
    k = V.shape[1]
    U = -np.sort(-V, axis=1)
    css = np.cumsum(U, axis=1) - 1.0
    ind = np.arange(1, k + 1)
    cond = U - css / ind > 0
    rho = k - 1 - np.argmax(cond[:, ::-1], axis=1)
    tau = css[np.arange(V.shape[0]), rho] / (rho + 1)
    return np.maximum(V - tau[:, None], 0.0)


class _BatchedLovasz:
    """Objective and subgradient for all k columns at once."""

    def __init__(self, instance: Instance):
        f = instance.oracle
        self.f = f
        self.f0 = f._f(0)
        self.bits = np.left_shift(np.uint64(1), np.arange(f.n, dtype=np.uint64))

    def __call__(self, x):
        n, k = x.shape
        order = np.argsort(-x, axis=0, kind="stable")
        prefix = np.bitwise_or.accumulate(self.bits[order], axis=0)
        vals = self.f.evaluate_many(prefix)
        g = np.empty_like(x)
        marg = np.diff(vals, axis=0, prepend=self.f0)
        np.put_along_axis(g, order, marg, axis=0)
        obj = k * self.f0 + float(np.sum(g * x))
        return obj, g


@dataclass(frozen=True)
class SolverParams:
    max_iters: int = 5000
    step_rule: str = "sqrt"  # "sqrt": c / sqrt(t); "constant": c
    c: float = 1.0
    tolerance: float = 1e-12
    seed: int = 0
    window: int = 100
    polish: bool = True

    def __post_init__(self):
        if not isinstance(self.max_iters, (int, np.integer)) or self.max_iters < 1:
            raise ParameterError(f"max_iters must be >= 1, got {self.max_iters!r}")
        if self.step_rule not in ("sqrt", "constant"):
            raise ParameterError(f"unknown step rule {self.step_rule!r}")
        if not self.c > 0:
            raise ParameterError("step constant c must be positive")
        if not self.tolerance > 0:
            raise ParameterError("tolerance must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError("seed must be a 64-bit unsigned integer")


@dataclass
class SolveResult:
    allocation: FractionalAllocation
    objective: float
    trace: list[tuple[int, float, float]] = field(default_factory=list)

    @property
    def iterations(self):
        return self.trace[-1][0]


def _one_hot(assignment, k):
    z = np.zeros((assignment.shape[0], k))
    z[np.arange(assignment.shape[0]), assignment] = 1.0
    return z


def _integral_candidates(x, instance):
    """Integral allocations near x: argmax labelling and the threshold roundings of x."""
    from .rounding import round_half, round_symmetric

    a = np.argmax(x, axis=1)
    for i, s in enumerate(instance.terminals):
        a[s] = i
    out = [_one_hot(a, instance.k)]
    f = instance.oracle
    if f.nonnegative:
        alloc = FractionalAllocation(x, instance)
        out.append(_one_hot(round_half(alloc).assignment, instance.k))
        if f.symmetric:
            out.append(_one_hot(round_symmetric(alloc).assignment, instance.k))
    return out


def solve_fractional(instance: Instance, params: SolverParams | None = None) -> SolveResult:
    """Projected subgradient descent with best-iterate tracking.

    Each step moves every column against its greedy Lovász subgradient,
    scaled to unit max-norm so the step length does not depend on the size
    of the weights, and projects the free rows back onto the simplex.  With
    ``params.polish`` a few integral points derived from the best iterate
    (argmax labelling, threshold roundings) are also evaluated; they are
    feasible, and one is kept only when strictly better.
    """
    params = params or SolverParams()
    x = terminal_allocation(instance)
    oracle = _BatchedLovasz(instance)
    obj, g = oracle(x)
    best_x, best = x.copy(), obj
    trace = [(0, obj, best)]
    free = np.array(instance.free, dtype=np.int64)
    if free.size:
        for t in range(1, params.max_iters + 1):
            step = params.c / math.sqrt(t) if params.step_rule == "sqrt" else params.c
            gf = g[free]
            scale = float(np.abs(gf).max())
            if scale == 0.0:
                break
            x[free] = project_rows(x[free] - (step / scale) * gf)
            obj, g = oracle(x)
            if obj < best:
                best, best_x = obj, x.copy()
            trace.append((t, obj, best))
            w = params.window
            if t >= w and trace[t - w][2] - best < params.tolerance:
                break
    if params.polish and free.size:
        for z in _integral_candidates(best_x, instance):
            zobj, _ = oracle(z)
            if zobj < best:
                best, best_x = zobj, z
                trace.append((trace[-1][0], zobj, best))
    alloc = FractionalAllocation(best_x, instance)
    return SolveResult(alloc, objective(alloc), trace)


def simplex_grid(k: int, m: int) -> np.ndarray:
    """All integer vectors of length k with entries summing to m (lexicographic)."""
    pts = []
    for bars in itertools.combinations(range(m + k - 1), k - 1):
        prev = -1
        row = []
        for b in bars:
            row.append(b - prev - 1)
            prev = b
        row.append(m + k - 2 - prev)
        pts.append(row)
    return np.array(pts, dtype=np.int64)


def grid_search_oracle(instance: Instance, m: int) -> FractionalAllocation:
    """Best allocation whose free rows lie on the simplex grid with denominator m.

    Exhaustive; only for at most two free vertices and k <= 4.  Columns are
    independent given the free rows, so each column's Lovász value is
    tabulated over the (m+1)^2 pairs of free-row entries first.
    """
    if m < 1:
        raise ParameterError("grid resolution must be positive")
    free = instance.free
    if len(free) > 2 or instance.k > 4:
        raise CapabilityError("grid search needs at most 2 free vertices and k <= 4")
    f = instance.oracle
    k = instance.k
    base = terminal_allocation(instance)
    if not free:
        return FractionalAllocation(base, instance)
    pts = simplex_grid(k, m)
    levels = np.arange(m + 1) / m
    if len(free) == 1:
        a = free[0]
        col = np.empty((k, m + 1))
        for i in range(k):
            y = base[:, i].copy()
            for p in range(m + 1):
                y[a] = levels[p]
                col[i, p] = lovasz_extension(f, y)
        totals = col[np.arange(k)[None, :], pts].sum(axis=1)
        best = int(np.argmin(totals))
        base[a] = pts[best] / m
        return FractionalAllocation(base, instance)
    a, b = free
    col = np.empty((k, m + 1, m + 1))
    for i in range(k):
        y = base[:, i].copy()
        for p in range(m + 1):
            y[a] = levels[p]
            for q in range(m + 1):
                y[b] = levels[q]
                col[i, p, q] = lovasz_extension(f, y)
    _, ia, ib = _kernels.grid_pair_min(col, pts)
    base[a] = pts[ia] / m
    base[b] = pts[ib] / m
    return FractionalAllocation(base, instance)
