"""Threshold rounding of fractional allocations into multiway partitions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, MalformedInputError, UnsupportedInstanceError
from .relaxation import FractionalAllocation
from .setfunc import Instance, SetFunction, full_mask, members_of, warn_if_asymmetric


@dataclass(frozen=True, eq=False)
class Partition:
    assignment: np.ndarray
    instance: Instance

    def __post_init__(self):
        a = np.array(self.assignment, dtype=np.int64)
        a.setflags(write=False)
        object.__setattr__(self, "assignment", a)
        inst = self.instance
        if a.shape != (inst.n,):
            raise MalformedInputError(f"assignment must have length {inst.n}")
        if a.size and (a.min() < 0 or a.max() >= inst.k):
            raise MalformedInputError(f"labels must lie in [0, {inst.k})")
        for i, s in enumerate(inst.terminals):
            if a[s] != i:
                raise MalformedInputError(f"terminal {s} is not in part {i}")

    def __eq__(self, other):
        return isinstance(other, Partition) and np.array_equal(self.assignment, other.assignment)

    @property
    def parts(self) -> list[int]:
        out = [0] * self.instance.k
        for v, i in enumerate(self.assignment.tolist()):
            out[i] |= 1 << v
        return out

    @classmethod
    def from_parts(cls, parts, instance: Instance) -> "Partition":
        a = np.full(instance.n, -1, dtype=np.int64)
        for i, p in enumerate(parts):
            for v in members_of(p):
                if a[v] != -1:
                    raise MalformedInputError(f"element {v} lies in two parts")
                a[v] = i
        if (a < 0).any():
            raise MalformedInputError("parts do not cover the ground set")
        return cls(a, instance)


def partition_cost(p: Partition, oracle: SetFunction | None = None) -> float:
    f = oracle if oracle is not None else p.instance.oracle
    return sum(f._f(m) for m in p.parts)


@dataclass(frozen=True)
class ThetaSets:
    per_label: tuple[int, ...]
    allocated: int
    unallocated: int
    theta: float


def _column_mask(col, theta):
    m = 0
    for v, val in enumerate(col):
        if val >= theta:
            m |= 1 << v
    return m


def theta_sets(x: FractionalAllocation, theta: float, labels=None) -> ThetaSets:
    """Level sets A(i, theta) = {v : x(v, i) >= theta}.

    ``labels`` restricts rounding to a subset of columns; the unallocated
    set is then taken relative to those columns only.
    """
    if not 0.0 < theta <= 1.0:
        raise DomainError(f"theta must lie in (0, 1], got {theta!r}")
    labels = range(x.k) if labels is None else labels
    cols = x.x.T.tolist()
    per = tuple(_column_mask(cols[i], theta) for i in labels)
    alloc = 0
    for m in per:
        alloc |= m
    return ThetaSets(per, alloc, full_mask(x.n) & ~alloc, float(theta))


def breakpoints(x: FractionalAllocation, lo: float, hi: float, labels=None) -> list[float]:
    """Distinct entries of x in (lo, hi], plus hi itself.

    The level sets are constant on every interval between consecutive
    returned values and equal their value at the interval's right end.
    """
    if not 0.0 <= lo < hi <= 1.0:
        raise DomainError(f"need 0 <= lo < hi <= 1, got ({lo}, {hi})")
    vals = x.x if labels is None else x.x[:, list(labels)]
    pts = {float(v) for v in np.unique(vals) if lo < v <= hi}
    pts.add(float(hi))
    return sorted(pts)


def uncross(sets, oracle: SetFunction) -> list[int]:
    """Make the sets pairwise disjoint without increasing total cost (symmetric f).

    Repeatedly takes the lexicographically first intersecting pair (i, j)
    and removes the overlap from A_j if that does not increase f(A_j),
    otherwise from A_i.  The union is unchanged.
    """
    warn_if_asymmetric(oracle, "uncross")
    A = [int(s) for s in sets]
    f = oracle._f
    k = len(A)
    i = 0
    while i < k:
        j = i + 1
        while j < k:
            if A[i] & A[j]:
                shrunk = A[j] & ~A[i]
                if f(shrunk) <= f(A[j]):
                    A[j] = shrunk
                else:
                    A[i] &= ~A[j]
            j += 1
        i += 1
    return A


def _attach(parts, U, f, attach, target):
    """Cost and parts after adding U to one part; 'last' uses ``target``, 'best' tries all."""
    base = [f(p) for p in parts]
    total = sum(base)
    # target first so ties keep the 'last' behaviour
    choices = [target] if attach == "last" else [target] + [t for t in range(len(parts)) if t != target]
    best = None
    for t in choices:
        c = total - base[t] + f(parts[t] | U)
        if best is None or c < best[0]:
            best = (c, t)
    c, t = best
    out = list(parts)
    out[t] |= U
    return c, out


def _check_attach(attach):
    if attach not in ("last", "best"):
        raise ValueError(f"attach must be 'last' or 'best', got {attach!r}")


def _require_symmetric(x: FractionalAllocation, what):
    f = x.instance.oracle
    if not f.symmetric:
        raise UnsupportedInstanceError(f"{what} requires a symmetric oracle")
    if not f.nonnegative:
        raise UnsupportedInstanceError(f"{what} requires a non-negative oracle")


def symmetric_outcome(x: FractionalAllocation, theta: float, attach="last"):
    """(cost, parts) of one uncrossing round at threshold theta."""
    f = x.instance.oracle
    ts = theta_sets(x, theta)
    parts = uncross(ts.per_label, f)
    return _attach(parts, ts.unallocated, f._f, attach, x.k - 1)


def round_symmetric(x: FractionalAllocation, attach: str = "best") -> Partition:
    """Derandomised uncrossing rounding: best threshold among all breakpoints.

    ``attach='last'`` gives the unallocated set to the last part;
    ``'best'`` gives it to whichever part is cheapest.
    """
    _check_attach(attach)
    _require_symmetric(x, "symmetric rounding")
    best = None
    for theta in breakpoints(x, 0.0, 1.0):
        c, parts = symmetric_outcome(x, theta, attach)
        if best is None or c < best[0]:
            best = (c, parts)
    return Partition.from_parts(best[1], x.instance)


def heaviest_label(x: FractionalAllocation) -> int:
    from .setfunc import lovasz_extension

    f = x.instance.oracle
    vals = [lovasz_extension(f, x.x[:, i]) for i in range(x.k)]
    return int(np.argmax(vals))


def isolate_outcome(x: FractionalAllocation, theta: float, heavy: int):
    f = x.instance.oracle
    rest = [i for i in range(x.k) if i != heavy]
    ts = theta_sets(x, theta, labels=rest)
    disjoint = uncross(ts.per_label, f)
    parts = [0] * x.k
    for i, p in zip(rest, disjoint):
        parts[i] = p
    parts[heavy] = ts.unallocated
    return sum(f._f(p) for p in parts), parts


def round_symmetric_isolate(x: FractionalAllocation) -> Partition:
    """Round all columns except the one with largest Lovász value; that label takes the rest."""
    _require_symmetric(x, "symmetric rounding")
    heavy = heaviest_label(x)
    rest = [i for i in range(x.k) if i != heavy]
    thetas = breakpoints(x, 0.0, 1.0, labels=rest) if rest else [1.0]
    best = None
    for theta in thetas:
        c, parts = isolate_outcome(x, theta, heavy)
        if best is None or c < best[0]:
            best = (c, parts)
    return Partition.from_parts(best[1], x.instance)


def half_outcome(x: FractionalAllocation, theta: float, attach="last"):
    f = x.instance.oracle
    ts = theta_sets(x, theta)
    return _attach(list(ts.per_label), ts.unallocated, f._f, attach, x.k - 1)


def round_half(x: FractionalAllocation, attach: str = "best", isolate_heaviest: bool = False) -> Partition:
    """Derandomised threshold rounding with theta restricted to (1/2, 1].

    Above 1/2 the level sets are disjoint because rows sum to one, so no
    uncrossing is needed and f need not be symmetric.

    ``isolate_heaviest`` is experimental and carries no guarantee: only the
    columns other than the heaviest are rounded and that label takes every
    remaining element.
    """
    _check_attach(attach)
    if not x.instance.oracle.nonnegative:
        raise UnsupportedInstanceError("half rounding requires a non-negative oracle")
    f = x.instance.oracle
    best = None
    if isolate_heaviest:
        heavy = heaviest_label(x)
        rest = [i for i in range(x.k) if i != heavy]
        thetas = breakpoints(x, 0.5, 1.0, labels=rest) if rest else [1.0]
        for theta in thetas:
            ts = theta_sets(x, theta, labels=rest)
            parts = [0] * x.k
            for i, p in zip(rest, ts.per_label):
                parts[i] = p
            parts[heavy] = ts.unallocated
            c = sum(f._f(p) for p in parts)
            if best is None or c < best[0]:
                best = (c, parts)
        return Partition.from_parts(best[1], x.instance)
    for theta in breakpoints(x, 0.5, 1.0):
        c, parts = half_outcome(x, theta, attach)
        if best is None or c < best[0]:
            best = (c, parts)
    return Partition.from_parts(best[1], x.instance)
