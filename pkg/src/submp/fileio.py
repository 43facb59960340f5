"""Text formats: instance documents, result files and CSV reports.

Instance documents are line-oriented ``key: value`` text::

    # star: centre 0 joined to three terminals
    n: 4
    names: c s1 s2 s3
    terminals: 1 2 3
    function: graph_cut
    edge: 0 1 1
    edge: 0 2 1
    edge: 0 3 1

Per family the repeated lines are ``edge: u v w`` (graph_cut),
``hyperedge: w v1 v2 ...`` (hypergraph_cut, hypergraph_mc), ``values: ...``
(table, may span several lines, 2^n numbers in bitmask order) and
``weights: ...`` plus ``edge: u v`` (node_weighted).  Vertices and
terminals may be written as indices or as names.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import MalformedInputError, ParseError
from .reductions import NodeWeightedGraph, reduce_hypergraph_mc, reduce_node_weighted_mc
from .relaxation import FractionalAllocation, feasibility_violation
from .setfunc import (
    TABLE_MAX_N,
    ExplicitTable,
    GraphCut,
    GroundSet,
    Hypergraph,
    HypergraphCut,
    HypergraphMCReduced,
    Instance,
    MAX_N,
)

INSTANCE_FAMILIES = ("graph_cut", "hypergraph_cut", "hypergraph_mc", "table", "node_weighted")
_SINGLE = {"n", "names", "terminals", "function", "symmetric"}
_REPEAT = {"edge", "hyperedge", "values", "weights"}


def _read_text(source) -> str:
    if hasattr(source, "read"):
        return source.read()
    if isinstance(source, (str, os.PathLike)) and (isinstance(source, os.PathLike) or "\n" not in source):
        with open(source, encoding="utf-8") as fh:
            return fh.read()
    return str(source)


def _lines(text):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ParseError(f"expected 'key: value', got {raw.strip()!r}", line=no)
        key, val = line.split(":", 1)
        yield no, key.strip().lower(), val.split()


def _number(tok, no, fld):
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"not a number: {tok!r}", line=no, field=fld) from None
    if not np.isfinite(v):
        raise ParseError(f"non-finite value {tok!r}", line=no, field=fld)
    return v


def _weight(tok, no, fld):
    w = _number(tok, no, fld)
    if w < 0:
        raise ParseError(f"negative weight {tok}", line=no, field=fld)
    return w


def _count(tok, no, fld):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}", line=no, field=fld) from None


@dataclass
class InstanceDocument:
    """Parsed document before the function family is turned into an oracle."""

    family: str
    n: int
    terminals: tuple[int, ...]
    names: tuple[str, ...] | None = None
    edges: list = field(default_factory=list)
    hyperedges: list = field(default_factory=list)
    values: list = field(default_factory=list)
    weights: list = field(default_factory=list)
    symmetric: bool | None = None

    def hypergraph(self) -> Hypergraph:
        return Hypergraph(self.n, tuple(self.hyperedges), self.names)

    def node_weighted_graph(self) -> NodeWeightedGraph:
        return NodeWeightedGraph(self.n, tuple(self.weights), tuple(self.edges), self.names)


def parse_document(source) -> InstanceDocument:
    text = _read_text(source)
    single: dict[str, tuple[int, list[str]]] = {}
    repeated: list[tuple[int, str, list[str]]] = []
    for no, key, toks in _lines(text):
        if key in _SINGLE:
            if key in single:
                raise ParseError(f"duplicate field {key!r}", line=no, field=key)
            single[key] = (no, toks)
        elif key in _REPEAT:
            repeated.append((no, key, toks))
        else:
            raise ParseError(f"unknown field {key!r}", line=no, field=key)
    for req in ("n", "terminals", "function"):
        if req not in single:
            raise ParseError(f"missing required field {req!r}", field=req)

    no, toks = single["n"]
    if len(toks) != 1:
        raise ParseError("n takes one integer", line=no, field="n")
    n = _count(toks[0], no, "n")
    if not 1 <= n <= MAX_N:
        raise ParseError(f"n must lie in [1, {MAX_N}]", line=no, field="n")

    names = None
    if "names" in single:
        no, toks = single["names"]
        if len(toks) != n:
            raise ParseError(f"expected {n} names, got {len(toks)}", line=no, field="names")
        if len(set(toks)) != n:
            raise ParseError("names must be distinct", line=no, field="names")
        names = tuple(toks)
    lookup = {s: i for i, s in enumerate(names)} if names else {}

    def vertex(tok, no, fld):
        if tok in lookup:
            return lookup[tok]
        v = _count(tok, no, fld)
        if not 0 <= v < n:
            raise ParseError(f"index {v} out of range [0, {n})", line=no, field=fld)
        return v

    no, toks = single["function"]
    if len(toks) != 1 or toks[0] not in INSTANCE_FAMILIES:
        raise ParseError(f"function must be one of {', '.join(INSTANCE_FAMILIES)}", line=no, field="function")
    family = toks[0]

    no, toks = single["terminals"]
    if not toks:
        raise ParseError("at least one terminal is required", line=no, field="terminals")
    terms = tuple(vertex(t, no, "terminals") for t in toks)
    if len(set(terms)) != len(terms):
        raise ParseError("duplicate terminals", line=no, field="terminals")

    doc = InstanceDocument(family, n, terms, names)
    if "symmetric" in single:
        no, toks = single["symmetric"]
        if len(toks) != 1 or toks[0].lower() not in ("true", "false"):
            raise ParseError("symmetric must be true or false", line=no, field="symmetric")
        doc.symmetric = toks[0].lower() == "true"

    allowed = {
        "graph_cut": {"edge"},
        "hypergraph_cut": {"hyperedge"},
        "hypergraph_mc": {"hyperedge"},
        "table": {"values"},
        "node_weighted": {"weights", "edge"},
    }[family]
    for no, key, toks in repeated:
        if key not in allowed:
            raise ParseError(f"field {key!r} is not valid for function {family}", line=no, field=key)
        if key == "edge" and family == "graph_cut":
            if len(toks) != 3:
                raise ParseError("edge needs 'u v weight'", line=no, field="edge")
            doc.edges.append((vertex(toks[0], no, "edge"), vertex(toks[1], no, "edge"), _weight(toks[2], no, "edge")))
        elif key == "edge":
            if len(toks) != 2:
                raise ParseError("edge needs 'u v'", line=no, field="edge")
            u, v = vertex(toks[0], no, "edge"), vertex(toks[1], no, "edge")
            if u == v:
                raise ParseError(f"self-loop at {u}", line=no, field="edge")
            doc.edges.append((u, v))
        elif key == "hyperedge":
            if len(toks) < 2:
                raise ParseError("hyperedge needs 'weight v1 [v2 ...]'", line=no, field="hyperedge")
            w = _weight(toks[0], no, "hyperedge")
            doc.hyperedges.append((tuple(vertex(t, no, "hyperedge") for t in toks[1:]), w))
        elif key == "values":
            doc.values.extend(_number(t, no, "values") for t in toks)
        elif key == "weights":
            doc.weights.extend(_weight(t, no, "weights") for t in toks)

    if family == "table":
        if n > TABLE_MAX_N:
            raise ParseError(f"tables are limited to n <= {TABLE_MAX_N}", field="n")
        if len(doc.values) != 1 << n:
            raise ParseError(f"table needs exactly {1 << n} values, got {len(doc.values)}", field="values")
    if family == "node_weighted" and len(doc.weights) != n:
        raise ParseError(f"expected {n} node weights, got {len(doc.weights)}", field="weights")
    return doc


def document_to_instance(doc: InstanceDocument) -> Instance:
    ground = GroundSet(doc.n, doc.names)
    try:
        if doc.family == "graph_cut":
            inst = Instance(GraphCut(ground, tuple(doc.edges)), doc.terminals)
        elif doc.family == "hypergraph_cut":
            inst = Instance(HypergraphCut(ground, tuple(doc.hyperedges)), doc.terminals)
        elif doc.family == "hypergraph_mc":
            inst = reduce_hypergraph_mc(doc.hypergraph(), doc.terminals)
        elif doc.family == "table":
            inst = Instance(ExplicitTable(ground, tuple(doc.values)), doc.terminals)
        else:
            H = reduce_node_weighted_mc(doc.node_weighted_graph(), doc.terminals)
            inst = reduce_hypergraph_mc(H, doc.terminals)
    except MalformedInputError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc)) from exc
    if doc.symmetric is not None and doc.symmetric != bool(inst.oracle.symmetric):
        raise ParseError(
            f"declared symmetric: {str(doc.symmetric).lower()} but the function is "
            f"{'' if inst.oracle.symmetric else 'not '}symmetric",
            field="symmetric",
        )
    return inst


def parse_instance(source) -> Instance:
    """Instance from a path, an open stream or the document text itself."""
    return document_to_instance(parse_document(source))


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _header(lines, n, names, terminals, family, symmetric=None):
    lines.append(f"n: {n}")
    if names is not None:
        lines.append("names: " + " ".join(names))
    lines.append("terminals: " + " ".join(str(t) for t in terminals))
    lines.append(f"function: {family}")
    if symmetric is not None:
        lines.append(f"symmetric: {str(symmetric).lower()}")


def format_document(doc: InstanceDocument) -> str:
    lines: list[str] = []
    _header(lines, doc.n, doc.names, doc.terminals, doc.family, doc.symmetric)
    if doc.family == "graph_cut":
        lines += [f"edge: {u} {v} {_fmt(w)}" for u, v, w in doc.edges]
    elif doc.family in ("hypergraph_cut", "hypergraph_mc"):
        lines += [f"hyperedge: {_fmt(w)} " + " ".join(map(str, vs)) for vs, w in doc.hyperedges]
    elif doc.family == "table":
        for lo in range(0, len(doc.values), 8):
            lines.append("values: " + " ".join(_fmt(v) for v in doc.values[lo:lo + 8]))
    else:
        lines.append("weights: " + " ".join(_fmt(w) for w in doc.weights))
        lines += [f"edge: {u} {v}" for u, v in doc.edges]
    return "\n".join(lines) + "\n"


def format_instance(inst: Instance) -> str:
    """Canonical document for an instance; parsing it gives an equal instance."""
    f = inst.oracle
    names = f.ground.names
    if isinstance(f, GraphCut):
        doc = InstanceDocument("graph_cut", f.n, inst.terminals, names, edges=list(f.edges))
    elif isinstance(f, HypergraphCut):
        doc = InstanceDocument("hypergraph_cut", f.n, inst.terminals, names, hyperedges=list(f.edges))
    elif isinstance(f, HypergraphMCReduced):
        h = f.hypergraph
        doc = InstanceDocument("hypergraph_mc", h.n, inst.terminals, h.names, hyperedges=list(h.edges))
    elif isinstance(f, ExplicitTable):
        doc = InstanceDocument("table", f.n, inst.terminals, names, values=list(f.values))
    else:
        doc = InstanceDocument("table", f.n, inst.terminals, names, values=f.table.tolist())
    return format_document(doc)


def write_instance(inst: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_instance(inst))


# -- result files -------------------------------------------------------------

@dataclass
class ResultFile:
    command: str
    seed: int | None = None
    objective: float | None = None
    allocation: np.ndarray | None = None
    partition: list[int] | None = None
    cost: float | None = None
    ratios: dict[str, float] = field(default_factory=dict)
    residuals: list[tuple[str, float, bool]] = field(default_factory=list)
    extra: dict[str, str] = field(default_factory=dict)

    def format(self) -> str:
        out = [f"command: {self.command}"]
        if self.seed is not None:
            out.append(f"seed: {self.seed}")
        if self.objective is not None:
            out.append(f"objective: {_fmt(self.objective)}")
        if self.allocation is not None:
            a = np.asarray(self.allocation)
            out.append(f"allocation: {a.shape[0]} {a.shape[1]}")
            for row in a:
                out.append("row: " + " ".join(format(float(v), ".12g") for v in row))
        if self.partition is not None:
            out.append("partition: " + " ".join(str(int(i)) for i in self.partition))
        if self.cost is not None:
            out.append(f"cost: {_fmt(self.cost)}")
        for key in sorted(self.ratios):
            out.append(f"ratio {key}: {_fmt(self.ratios[key])}")
        for name, res, ok in self.residuals:
            out.append(f"residual {name}: {_fmt(res)} {'ok' if ok else 'FAIL'}")
        for key in sorted(self.extra):
            out.append(f"{key}: {self.extra[key]}")
        return "\n".join(out) + "\n"


def parse_result(source) -> ResultFile:
    text = _read_text(source)
    res = ResultFile(command="")
    rows = []
    shape = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise ParseError(f"expected 'key: value', got {line!r}", line=no)
        key, val = line.split(":", 1)
        key, val = key.strip(), val.strip()
        toks = val.split()
        if key == "command":
            res.command = val
        elif key == "seed":
            res.seed = _count(val, no, key)
        elif key == "objective":
            res.objective = _number(val, no, key)
        elif key == "allocation":
            if len(toks) != 2:
                raise ParseError("allocation needs 'rows cols'", line=no, field=key)
            shape = (_count(toks[0], no, key), _count(toks[1], no, key))
        elif key == "row":
            rows.append([_number(t, no, key) for t in toks])
        elif key == "partition":
            res.partition = [_count(t, no, key) for t in toks]
        elif key == "cost":
            res.cost = _number(val, no, key)
        elif key.startswith("ratio "):
            res.ratios[key[6:]] = _number(val, no, key)
        elif key.startswith("residual "):
            if len(toks) != 2:
                raise ParseError("residual needs 'value ok|FAIL'", line=no, field=key)
            res.residuals.append((key[9:], _number(toks[0], no, key), toks[1] == "ok"))
        else:
            res.extra[key] = val
    if rows:
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise ParseError("allocation rows have different lengths", field="row")
        a = np.array(rows, dtype=np.float64)
        if shape is not None and a.shape != shape:
            raise ParseError(f"allocation declared {shape} but has {a.shape}", field="allocation")
        res.allocation = a
    elif shape is not None:
        raise ParseError("allocation declared without rows", field="allocation")
    return res


def load_allocation(source, instance: Instance) -> FractionalAllocation:
    """Allocation from a result file, or from bare whitespace-separated rows."""
    text = _read_text(source)
    if any(":" in ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")):
        a = parse_result(io.StringIO(text)).allocation
        if a is None:
            raise ParseError("result file has no allocation", field="allocation")
    else:
        rows = []
        for no, ln in enumerate(text.splitlines(), start=1):
            ln = ln.split("#", 1)[0].strip()
            if ln:
                rows.append([_number(t, no, "row") for t in ln.split()])
        if not rows or len({len(r) for r in rows}) != 1:
            raise ParseError("allocation must be a non-empty rectangular matrix")
        a = np.array(rows, dtype=np.float64)
    problem = feasibility_violation(a, instance)
    if problem is not None:
        from .errors import FeasibilityError

        raise FeasibilityError(problem)
    return FractionalAllocation(a, instance)


# -- CSV ----------------------------------------------------------------------

def write_csv(path_or_stream, header, rows) -> None:
    own = not hasattr(path_or_stream, "write")
    fh = open(path_or_stream, "w", newline="", encoding="utf-8") if own else path_or_stream
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) if isinstance(v, float) else v for v in r])
    finally:
        if own:
            fh.close()


def write_trace_csv(path_or_stream, trace) -> None:
    write_csv(path_or_stream, ["iteration", "objective", "best"], trace)


def write_reports_csv(path_or_stream, reports) -> None:
    rows = [(r.label, r.kind, float(r.lhs), float(r.rhs), float(r.residual), "ok" if r.ok else "FAIL") for r in reports]
    write_csv(path_or_stream, ["check", "kind", "lhs", "rhs", "residual", "status"], rows)
