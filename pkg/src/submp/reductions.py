"""Reductions from hypergraph and node-weighted multiway cut, plus their
brute-force reference solvers."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import CapabilityError, MalformedInputError, UnsupportedInstanceError
from .setfunc import GroundSet, Hypergraph, HypergraphMCReduced, Instance, _check_weight

BRUTE_FORCE_LIMIT = 10**7


@dataclass(frozen=True)
class NodeWeightedGraph:
    n: int
    weights: tuple[float, ...]
    edges: tuple[tuple[int, int], ...]
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        GroundSet(self.n, self.names)
        if len(self.weights) != self.n:
            raise MalformedInputError(f"expected {self.n} node weights, got {len(self.weights)}")
        object.__setattr__(self, "weights", tuple(_check_weight(w) for w in self.weights))
        clean = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise MalformedInputError(f"edge ({u}, {v}) out of range")
            if u == v:
                raise MalformedInputError(f"self-loop at {u}")
            clean.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", tuple(sorted(clean)))
        if self.names is not None:
            object.__setattr__(self, "names", tuple(str(s) for s in self.names))


def reduce_hypergraph_mc(H: Hypergraph, terminals) -> Instance:
    """Sub-MP instance whose partition optimum equals the multiway-cut optimum of H."""
    for s in terminals:
        if not 0 <= s < H.n:
            raise MalformedInputError(f"terminal {s} is not a vertex of the hypergraph")
    return Instance(HypergraphMCReduced(H), tuple(terminals))


def reduce_node_weighted_mc(G: NodeWeightedGraph, terminals) -> Hypergraph:
    """Hypergraph whose hyperedge multiway cut equals G's node multiway cut.

    One hyperedge per non-terminal v with weight w(v).  Its members are v
    itself, the terminals adjacent to v, and one connector vertex per edge
    between v and another non-terminal; the connector of edge (u, v) is
    shared by exactly the hyperedges of u and v.  Connectors are appended
    after the original vertices in sorted edge order.  Terminals must be
    pairwise non-adjacent.
    """
    terms = set(int(s) for s in terminals)
    if len(terms) != len(terminals):
        raise MalformedInputError("terminals must be distinct")
    for s in terms:
        if not 0 <= s < G.n:
            raise MalformedInputError(f"terminal {s} out of range")
    members = {v: {v} for v in range(G.n) if v not in terms}
    extra = 0
    for u, v in G.edges:
        if u in terms and v in terms:
            raise UnsupportedInstanceError(f"terminals {u} and {v} are adjacent")
        if u in terms:
            members[v].add(u)
        elif v in terms:
            members[u].add(v)
        else:
            c = G.n + extra
            extra += 1
            members[u].add(c)
            members[v].add(c)
    names = None
    if G.names is not None:
        names = tuple(G.names) + tuple(f"c{j}" for j in range(extra))
    edges = tuple((tuple(sorted(members[v])), G.weights[v]) for v in sorted(members))
    return Hypergraph(G.n + extra, edges, names)


def _assignments(n, terminals, k):
    terms = list(terminals)
    free = [v for v in range(n) if v not in set(terms)]
    if k ** len(free) > BRUTE_FORCE_LIMIT:
        raise CapabilityError(f"{k}^{len(free)} assignments exceed the brute-force limit")
    label = [0] * n
    for i, s in enumerate(terms):
        label[s] = i
    for combo in itertools.product(range(k), repeat=len(free)):
        for v, i in zip(free, combo):
            label[v] = i
        yield label


def hypergraph_mc_opt(H: Hypergraph, terminals) -> float:
    """Minimum weight of hyperedges that are split by some terminal-respecting labelling."""
    best = float("inf")
    k = len(terminals)
    for label in _assignments(H.n, terminals, k):
        cost = 0.0
        for verts, w in H.edges:
            first = label[verts[0]]
            if any(label[v] != first for v in verts):
                cost += w
        best = min(best, cost)
    return best


def node_weighted_mc_opt(G: NodeWeightedGraph, terminals) -> float:
    """Minimum weight of non-terminals whose deletion pairwise separates the terminals."""
    terms = [int(s) for s in terminals]
    tset = set(terms)
    free = [v for v in range(G.n) if v not in tset]
    if 2 ** len(free) > BRUTE_FORCE_LIMIT:
        raise CapabilityError("too many non-terminals for brute force")
    adj = [[] for _ in range(G.n)]
    for u, v in G.edges:
        adj[u].append(v)
        adj[v].append(u)
    best = float("inf")
    for r in range(len(free) + 1):
        for deleted in itertools.combinations(free, r):
            cost = sum(G.weights[v] for v in deleted)
            if cost >= best:
                continue
            gone = set(deleted)
            if _terminals_separated(adj, terms, gone):
                best = cost
    return best


def _terminals_separated(adj, terms, gone):
    comp = {}
    for s in terms:
        if s in comp:
            return False
        stack = [s]
        comp[s] = s
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w in gone or w in comp:
                    continue
                comp[w] = s
                stack.append(w)
    return True
