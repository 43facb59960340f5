"""Set-function value oracles, Lovász extension and exhaustive structure checks.

Subsets of a ground set ``{0, ..., n-1}`` are Python ints used as bitmasks
(bit ``v`` set <=> element ``v`` is a member).  Batched evaluation takes
``numpy.uint64`` arrays.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import CapabilityError, DomainError, MalformedInputError, PreconditionError

MAX_N = 64
TABLE_MAX_N = 20
# below this size an oracle materialises its full value table on first use
AUTO_TABLE_N = 16


def mask_of(members: Iterable[int]) -> int:
    m = 0
    for v in members:
        m |= 1 << int(v)
    return m


def members_of(mask: int, n: int | None = None) -> list[int]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return out


def full_mask(n: int) -> int:
    return (1 << n) - 1


@dataclass(frozen=True)
class GroundSet:
    n: int
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise MalformedInputError(f"ground set size must be a positive integer, got {self.n!r}")
        if self.n > MAX_N:
            raise CapabilityError(f"ground sets are limited to {MAX_N} elements (got {self.n})")
        if self.names is not None:
            names = tuple(str(s) for s in self.names)
            if len(names) != self.n:
                raise MalformedInputError(f"expected {self.n} names, got {len(names)}")
            if len(set(names)) != len(names):
                raise MalformedInputError("element names must be distinct")
            object.__setattr__(self, "names", names)

    @property
    def full(self) -> int:
        return full_mask(self.n)

    def name(self, v: int) -> str:
        return self.names[v] if self.names is not None else str(v)

    def check_mask(self, mask) -> int:
        if not isinstance(mask, (int, np.integer)):
            mask = mask_of(self.check_index(v) for v in mask)
        mask = int(mask)
        if mask < 0 or mask >> self.n:
            raise MalformedInputError(f"subset {mask:#x} has elements outside [0, {self.n})")
        return mask

    def check_index(self, v) -> int:
        if not isinstance(v, (int, np.integer)) or not 0 <= v < self.n:
            raise MalformedInputError(f"element index {v!r} out of range [0, {self.n})")
        return int(v)


class SetFunction:
    """Base class for value oracles.

    Subclasses provide ``ground``, the ``nonnegative`` / ``symmetric`` flags
    and ``_values(masks)`` evaluating a ``uint64`` array.
    """

    family = "abstract"
    ground: GroundSet

    @property
    def n(self) -> int:
        return self.ground.n

    def _values(self, masks: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @cached_property
    def table(self) -> np.ndarray:
        """All 2^n values, indexed by bitmask (only for n <= 20)."""
        if self.n > TABLE_MAX_N:
            raise CapabilityError(f"full value table needs n <= {TABLE_MAX_N} (n = {self.n})")
        t = self._values(np.arange(1 << self.n, dtype=np.uint64))
        t.setflags(write=False)
        return t

    @cached_property
    def _table_list(self) -> list[float] | None:
        if self.n > AUTO_TABLE_N:
            return None
        return self.table.tolist()

    def __call__(self, mask) -> float:
        return self.evaluate(mask)

    def evaluate(self, mask) -> float:
        mask = self.ground.check_mask(mask)
        t = self._table_list
        if t is not None:
            return t[mask]
        return float(self._values(np.array([mask], dtype=np.uint64))[0])

    def evaluate_many(self, masks) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.uint64)
        if masks.size and int(masks.max()) >> self.n:
            raise MalformedInputError(f"subset has elements outside [0, {self.n})")
        if self.n <= AUTO_TABLE_N:
            return self.table[masks.astype(np.int64)]
        return self._values(masks.ravel()).reshape(masks.shape)

    # unchecked fast path for internal loops that build masks themselves
    def _f(self, mask: int) -> float:
        t = self._table_list
        if t is not None:
            return t[mask]
        return float(self._values(np.array([mask], dtype=np.uint64))[0])


def _edge_arrays(edges):
    masks = np.array([mask_of(e) for e, _ in edges], dtype=np.uint64)
    weights = np.array([w for _, w in edges], dtype=np.float64)
    return masks, weights


def _check_weight(w) -> float:
    w = float(w)
    if not math.isfinite(w) or w < 0:
        raise MalformedInputError(f"weights must be finite and non-negative, got {w!r}")
    return w


@dataclass(frozen=True, eq=True)
class GraphCut(SetFunction):
    """f(A) = total weight of edges with exactly one endpoint in A."""

    ground: GroundSet
    edges: tuple[tuple[int, int, float], ...]

    family = "graph_cut"
    nonnegative = True
    symmetric = True

    def __post_init__(self):
        clean = []
        for e in self.edges:
            if len(e) != 3:
                raise MalformedInputError(f"graph edge must be (u, v, weight), got {e!r}")
            u, v, w = e
            clean.append((self.ground.check_index(u), self.ground.check_index(v), _check_weight(w)))
        object.__setattr__(self, "edges", tuple(clean))

    @cached_property
    def _arrays(self):
        return _edge_arrays([((u, v), w) for u, v, w in self.edges])

    def _values(self, masks):
        em, w = self._arrays
        return _kernels.cut_values(masks, em, w)


@dataclass(frozen=True, eq=True)
class HypergraphCut(SetFunction):
    """f(A) = total weight of hyperedges that meet A but are not inside A."""

    ground: GroundSet
    edges: tuple[tuple[tuple[int, ...], float], ...]

    family = "hypergraph_cut"
    nonnegative = True
    symmetric = True

    def __post_init__(self):
        clean = []
        for e in self.edges:
            verts, w = e
            verts = tuple(sorted({self.ground.check_index(v) for v in verts}))
            clean.append((verts, _check_weight(w)))
        object.__setattr__(self, "edges", tuple(clean))

    @cached_property
    def _arrays(self):
        return _edge_arrays(self.edges)

    def _values(self, masks):
        em, w = self._arrays
        return _kernels.cut_values(masks, em, w)


@dataclass(frozen=True)
class Hypergraph:
    n: int
    edges: tuple[tuple[tuple[int, ...], float], ...]
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        GroundSet(self.n, self.names)
        clean = []
        for verts, w in self.edges:
            verts = tuple(sorted({int(v) for v in verts}))
            if not verts:
                raise MalformedInputError("empty hyperedge")
            for v in verts:
                if not 0 <= v < self.n:
                    raise MalformedInputError(f"hyperedge vertex {v} out of range [0, {self.n})")
            clean.append((verts, _check_weight(w)))
        object.__setattr__(self, "edges", tuple(clean))
        if self.names is not None:
            object.__setattr__(self, "names", tuple(str(s) for s in self.names))


@dataclass(frozen=True, eq=True)
class HypergraphMCReduced(SetFunction):
    """Asymmetric function encoding hypergraph multiway cut.

    The ground set is the hypergraph's vertices followed by one auxiliary
    element ``u_e`` per hyperedge (in edge order), and
    ``f(S) = sum_e w(e) * [u_e in S and e not a subset of S]``.
    """

    hypergraph: Hypergraph

    family = "hypergraph_mc"
    nonnegative = True

    @cached_property
    def ground(self) -> GroundSet:
        h = self.hypergraph
        names = None
        if h.names is not None:
            names = tuple(h.names) + tuple(f"e{j}" for j in range(len(h.edges)))
        return GroundSet(h.n + len(h.edges), names)

    @property
    def symmetric(self) -> bool:
        # any positive-weight edge e gives f({u_e}) = w(e) > 0 = f(V - {u_e})
        return not any(w > 0 for _, w in self.hypergraph.edges)

    def aux_index(self, e: int) -> int:
        return self.hypergraph.n + e

    @cached_property
    def _arrays(self):
        h = self.hypergraph
        em, w = _edge_arrays(h.edges)
        aux = np.array([1 << (h.n + j) for j in range(len(h.edges))], dtype=np.uint64)
        return em, aux, w

    def _values(self, masks):
        em, aux, w = self._arrays
        return _kernels.mc_reduced_values(masks, em, aux, w)


@dataclass(frozen=True, eq=True)
class ExplicitTable(SetFunction):
    """Arbitrary set function stored as 2^n values indexed by bitmask."""

    ground: GroundSet
    values: tuple[float, ...]

    family = "table"

    def __post_init__(self):
        if self.ground.n > TABLE_MAX_N:
            raise CapabilityError(f"explicit tables are limited to n <= {TABLE_MAX_N}")
        vals = tuple(float(v) for v in self.values)
        if len(vals) != 1 << self.ground.n:
            raise MalformedInputError(
                f"table needs exactly 2^{self.ground.n} = {1 << self.ground.n} values, got {len(vals)}"
            )
        if not all(math.isfinite(v) for v in vals):
            raise MalformedInputError("table values must be finite")
        object.__setattr__(self, "values", vals)

    @cached_property
    def _array(self):
        return np.array(self.values, dtype=np.float64)

    @cached_property
    def nonnegative(self) -> bool:
        return bool((self._array >= 0).all())

    @cached_property
    def symmetric(self) -> bool:
        t = self._array
        return bool(np.array_equal(t, t[::-1]))

    def _values(self, masks):
        return self._array[masks.astype(np.int64)]


@dataclass(frozen=True)
class Instance:
    oracle: SetFunction
    terminals: tuple[int, ...]

    def __post_init__(self):
        terms = tuple(self.oracle.ground.check_index(s) for s in self.terminals)
        if not terms:
            raise MalformedInputError("an instance needs at least one terminal")
        if len(set(terms)) != len(terms):
            raise MalformedInputError(f"terminals must be distinct, got {terms}")
        object.__setattr__(self, "terminals", terms)

    @property
    def n(self) -> int:
        return self.oracle.n

    @property
    def k(self) -> int:
        return len(self.terminals)

    @cached_property
    def free(self) -> tuple[int, ...]:
        ts = set(self.terminals)
        return tuple(v for v in range(self.n) if v not in ts)


# ---------------------------------------------------------------------------
# operations


def evaluate(oracle: SetFunction, A) -> float:
    return oracle.evaluate(A)


def marginal(oracle: SetFunction, A, v: int) -> float:
    A = oracle.ground.check_mask(A)
    v = oracle.ground.check_index(v)
    if A >> v & 1:
        raise PreconditionError(f"element {v} is already in the set")
    return oracle._f(A | 1 << v) - oracle._f(A)


def _check_point(y, n: int) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (n,):
        raise MalformedInputError(f"expected a vector of length {n}, got shape {y.shape}")
    if not np.all((y >= 0.0) & (y <= 1.0)):
        raise DomainError("all coordinates must lie in [0, 1]")
    return y


def lovasz_extension(oracle: SetFunction, y) -> float:
    """Exact integral of f over the super-level sets {y >= theta}, theta in [0, 1].

    On each interval between consecutive distinct coordinate values the level
    set is constant, so the integral is a finite sum.
    """
    y = _check_point(y, oracle.n)
    levels = sorted({float(t) for t in y if t > 0.0}, reverse=True)
    if not levels:
        return oracle._f(0)
    total = (1.0 - levels[0]) * oracle._f(0)
    for t, level in enumerate(levels):
        below = levels[t + 1] if t + 1 < len(levels) else 0.0
        mask = 0
        for v in range(oracle.n):
            if y[v] >= level:
                mask |= 1 << v
        total += (level - below) * oracle._f(mask)
    return total


def lovasz_subgradient(oracle: SetFunction, y) -> np.ndarray:
    """Greedy subgradient: marginals along the order of decreasing y.

    Ties are broken by ascending element index.  The returned g satisfies
    ``f(0) + g @ y == lovasz_extension(y)`` and ``f(0) + g @ z <= lovasz_extension(z)``
    for every z in the cube, which gives the subgradient inequality.
    """
    y = _check_point(y, oracle.n)
    order = np.argsort(-y, kind="stable")
    bits = np.left_shift(np.uint64(1), order.astype(np.uint64))
    prefix = np.concatenate(([np.uint64(0)], np.bitwise_or.accumulate(bits)))
    vals = oracle.evaluate_many(prefix)
    g = np.empty(oracle.n)
    g[order] = np.diff(vals)
    return g


def check_submodular(oracle: SetFunction, tol: float = 1e-9):
    """Exhaustive check of decreasing marginals.

    Returns ``(True, None)`` or ``(False, (A, v, w))`` where
    f(A+v) - f(A) < f(A+v+w) - f(A+w).
    """
    if oracle.n > TABLE_MAX_N:
        raise CapabilityError(f"exhaustive submodularity check needs n <= {TABLE_MAX_N}")
    a, v, w = _kernels.submodular_witness(np.ascontiguousarray(oracle.table), oracle.n, tol)
    if a < 0:
        return True, None
    return False, (int(a), int(v), int(w))


def check_symmetric(oracle: SetFunction, tol: float = 1e-9) -> bool:
    if oracle.n > TABLE_MAX_N:
        raise CapabilityError(f"exhaustive symmetry check needs n <= {TABLE_MAX_N}")
    t = oracle.table
    return bool(np.all(np.abs(t - t[::-1]) <= tol))


def warn_if_asymmetric(oracle: SetFunction, what: str):
    if not oracle.symmetric:
        warnings.warn(f"{what}: oracle is not symmetric; cost guarantee does not apply", stacklevel=3)


def cut_of(n: int, edges: Sequence[tuple[int, int, float]], names=None) -> GraphCut:
    return GraphCut(GroundSet(n, names), tuple(edges))
