"""Random instances and random feasible allocations for sweeps and experiments.

All randomness comes from a single 64-bit seed: ``stream(seed, *key)``
derives an independent Philox generator per named stream, so adding a new
consumer never shifts the numbers another consumer sees.
"""

from __future__ import annotations

import zlib

import numpy as np

from .relaxation import FractionalAllocation, terminal_allocation
from .setfunc import ExplicitTable, GraphCut, GroundSet, Hypergraph, HypergraphCut, Instance
from .reductions import NodeWeightedGraph, reduce_hypergraph_mc

FAMILIES = ("graph_cut", "hypergraph_cut", "hypergraph_mc", "table", "sym_table")


def _key(part):
    if isinstance(part, str):
        return zlib.crc32(part.encode())
    return int(part)


def stream(seed: int, *key) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(_key(p) for p in key))
    return np.random.Generator(np.random.Philox(ss))


def _weights(rng, size, integral):
    if integral:
        return rng.integers(1, 4, size=size).astype(float)
    return np.round(rng.uniform(0.1, 2.0, size=size), 3)


def random_graph_cut(rng, n, k, p=0.5, integral=False) -> Instance:
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.append((u, v, float(_weights(rng, 1, integral)[0])))
    terms = tuple(int(t) for t in rng.choice(n, size=k, replace=False))
    return Instance(GraphCut(GroundSet(n), tuple(edges)), terms)


def random_hypergraph(rng, n, m, max_size=4, integral=False) -> Hypergraph:
    edges = []
    for w in _weights(rng, m, integral):
        size = int(rng.integers(2, min(max_size, n) + 1))
        verts = tuple(sorted(int(v) for v in rng.choice(n, size=size, replace=False)))
        edges.append((verts, float(w)))
    return Hypergraph(n, tuple(edges))


def random_hypergraph_cut(rng, n, k, m=None, integral=False) -> Instance:
    m = m if m is not None else int(rng.integers(1, 2 * n))
    H = random_hypergraph(rng, n, m, integral=integral)
    terms = tuple(int(t) for t in rng.choice(n, size=k, replace=False))
    return Instance(HypergraphCut(GroundSet(n), H.edges), terms)


def random_hypergraph_mc(rng, n_vertices, k, m, integral=False) -> Instance:
    H = random_hypergraph(rng, n_vertices, m, integral=integral)
    terms = tuple(int(t) for t in rng.choice(n_vertices, size=k, replace=False))
    return reduce_hypergraph_mc(H, terms)


def random_submodular_values(rng, n) -> np.ndarray:
    """Table of a random non-negative submodular function on n elements.

    Sum of a concave function of a random modular weight, a directed cut,
    a hypergraph cut and a positive constant, so f(empty) > 0 and the
    result is generally neither monotone nor symmetric.
    """
    masks = np.arange(1 << n, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(n)[None, :]) & 1
    a = rng.uniform(0.0, 2.0, size=n)
    cap = rng.uniform(0.5, a.sum() + 0.5)
    vals = np.minimum(bits @ a, cap)
    vals += np.sqrt(bits @ rng.uniform(0.0, 1.0, size=n))
    for _ in range(n):
        u, v = rng.choice(n, size=2, replace=False)
        vals += rng.uniform(0.1, 1.0) * (bits[:, u] * (1 - bits[:, v]))
    H = random_hypergraph(rng, n, n // 2 + 1)
    for verts, w in H.edges:
        inside = bits[:, list(verts)].sum(axis=1)
        vals += w * ((inside > 0) & (inside < len(verts)))
    vals += rng.uniform(0.0, 1.0)
    return np.round(vals, 9)


def random_table(rng, n, k, symmetric=False) -> Instance:
    vals = random_submodular_values(rng, n)
    if symmetric:
        vals = vals + vals[::-1]
    terms = tuple(int(t) for t in rng.choice(n, size=k, replace=False))
    return Instance(ExplicitTable(GroundSet(n), tuple(vals.tolist())), terms)


def random_instance(rng, family: str, n: int, k: int) -> Instance:
    """``n`` counts the elements of the final ground set, auxiliaries included."""
    if family == "graph_cut":
        return random_graph_cut(rng, n, k)
    if family == "hypergraph_cut":
        return random_hypergraph_cut(rng, n, k)
    if family == "hypergraph_mc":
        nv = max(k, int(rng.integers(max(k, (n + 1) // 2), n)) if n > k else k)
        return random_hypergraph_mc(rng, nv, k, max(1, n - nv))
    if family == "table":
        return random_table(rng, n, k)
    if family == "sym_table":
        return random_table(rng, n, k, symmetric=True)
    raise ValueError(f"unknown family {family!r}")


def random_node_weighted(rng, n, k, p=0.4, integral=True):
    """Random node-weighted graph with k pairwise non-adjacent terminals."""
    terms = [int(t) for t in rng.choice(n, size=k, replace=False)]
    tset = set(terms)
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if u in tset and v in tset:
                continue
            if rng.random() < p:
                edges.append((u, v))
    weights = tuple(float(w) for w in _weights(rng, n, integral))
    return NodeWeightedGraph(n, weights, tuple(edges)), tuple(terms)


def random_allocation(rng, instance: Instance, style: str = "dirichlet") -> FractionalAllocation:
    """Random feasible point of the relaxation.

    ``dirichlet``: continuous rows; ``grid``: rows on a coarse grid, so many
    entries tie; ``peaked``: each row leans heavily to one label.
    """
    k = instance.k
    m = len(instance.free)
    if style == "dirichlet":
        rows = rng.dirichlet(np.full(k, 0.7), size=m)
    elif style == "grid":
        den = int(rng.choice([2, 3, 4, 6]))
        rows = np.zeros((m, k))
        for r in range(m):
            cuts = np.sort(rng.integers(0, den + 1, size=k - 1))
            counts = np.diff(np.concatenate(([0], cuts, [den])))
            rows[r] = counts / den
    elif style == "peaked":
        rows = rng.dirichlet(np.full(k, 0.3), size=m)
        top = rng.integers(0, k, size=m)
        rows = 0.5 * rows
        rows[np.arange(m), top] += 0.5
    else:
        raise ValueError(f"unknown allocation style {style!r}")
    if m:
        rows = rows / rows.sum(axis=1, keepdims=True)
    return FractionalAllocation(terminal_allocation(instance, rows if m else None), instance)
