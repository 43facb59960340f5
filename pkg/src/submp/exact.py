"""Exhaustive reference solvers and ratio experiments."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import CapabilityError
from .relaxation import SolverParams, solve_fractional
from .rounding import Partition, partition_cost, round_half
from .setfunc import AUTO_TABLE_N, TABLE_MAX_N, Instance, SetFunction

BRUTE_FORCE_LIMIT = 10**7


def brute_force_size(instance: Instance) -> int:
    return instance.k ** (instance.n - instance.k)


def brute_force_opt(instance: Instance, force: bool = False) -> tuple[Partition, float]:
    """Minimum-cost partition over all labellings of the free elements.

    Ties go to the lexicographically smallest assignment vector.
    """
    if brute_force_size(instance) > BRUTE_FORCE_LIMIT and not force:
        raise CapabilityError(
            f"{instance.k}^{instance.n - instance.k} assignments exceed the limit of {BRUTE_FORCE_LIMIT}"
        )
    f = instance.oracle
    k = instance.k
    free = instance.free
    free_bits = np.array([1 << v for v in free], dtype=np.uint64)
    base = np.array([1 << s for s in instance.terminals], dtype=np.uint64)
    if f.n <= TABLE_MAX_N and (f.n <= AUTO_TABLE_N or k ** len(free) > 1 << f.n):
        value, digits = _kernels.brute_force_table(np.ascontiguousarray(f.table), free_bits, base, k)
    else:
        value, digits = _brute_force_generic(f, free_bits, base, k)
    assignment = np.empty(instance.n, dtype=np.int64)
    for i, s in enumerate(instance.terminals):
        assignment[s] = i
    assignment[list(free)] = digits
    p = Partition(assignment, instance)
    return p, partition_cost(p)


def _brute_force_generic(f: SetFunction, free_bits, base, k, chunk=1 << 15):
    m = free_bits.shape[0]
    total = k**m
    best, best_index = np.inf, 0
    for lo in range(0, total, chunk):
        idx = np.arange(lo, min(total, lo + chunk), dtype=np.int64)
        parts = _kernels.assignment_parts(idx, free_bits, base, k)
        costs = f.evaluate_many(parts).sum(axis=1)
        a = int(np.argmin(costs))
        if costs[a] < best:
            best, best_index = float(costs[a]), lo + a
    return best, _kernels.decode_assignment(best_index, m, k)


@dataclass
class GapResult:
    integral: float
    fractional: float
    gap: float


def integrality_gap(instance: Instance, params: SolverParams | None = None) -> GapResult:
    """Brute-force optimum divided by the fractional objective the solver reaches."""
    _, opt = brute_force_opt(instance)
    frac = solve_fractional(instance, params).objective
    if frac > 0:
        gap = opt / frac
    else:
        gap = 1.0 if opt <= 0 else math.inf
    return GapResult(opt, frac, gap)


@dataclass
class KWayResult:
    partition: Partition
    value: float
    terminals: tuple[int, ...]
    exact: bool
    fractional_bound: float | None = None


def solve_kway_by_guessing(oracle: SetFunction, k: int, params: SolverParams | None = None,
                           exact: bool | None = None) -> KWayResult:
    """Partition into k non-empty parts by trying every k-subset as terminals.

    Exact per guess when the total enumeration is small enough, otherwise
    each guess is solved fractionally and half-rounded; the best rounded
    value is then within twice the smallest fractional objective.
    """
    n = oracle.n
    if not 1 <= k <= n:
        raise CapabilityError(f"k must lie in [1, {n}]")
    guesses = math.comb(n, k)
    if exact is None:
        exact = guesses * k ** (n - k) <= BRUTE_FORCE_LIMIT
    best = None
    bound = math.inf
    for terms in itertools.combinations(range(n), k):
        inst = Instance(oracle, terms)
        if exact:
            p, val = brute_force_opt(inst, force=True)
        else:
            sol = solve_fractional(inst, params)
            bound = min(bound, sol.objective)
            p = round_half(sol.allocation)
            val = partition_cost(p)
        if best is None or val < best[1]:
            best = (p, val, terms)
    return KWayResult(best[0], best[1], best[2], exact, None if exact else bound)
