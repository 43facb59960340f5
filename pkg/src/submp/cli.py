"""Command-line interface: ``submp <command> ...``.

Exit codes: 0 ok, 2 parse or usage error, 3 capability limit, 4 infeasible
input or scheme/oracle mismatch, 5 verification failure.
"""

from __future__ import annotations

import argparse
import logging
import shlex
import sys

import numpy as np

from .analysis import DEFAULT_DELTAS, verify_all
from .errors import SubmpError, UnsupportedInstanceError
from .exact import brute_force_opt, integrality_gap, solve_kway_by_guessing
from .fileio import (
    InstanceDocument,
    ResultFile,
    format_document,
    format_instance,
    load_allocation,
    parse_document,
    parse_instance,
    write_csv,
    write_reports_csv,
    write_trace_csv,
)
from .generators import FAMILIES, random_instance, stream
from .reductions import reduce_node_weighted_mc
from .relaxation import SolverParams, objective, solve_fractional
from .rounding import partition_cost, round_half, round_symmetric, round_symmetric_isolate
from .setfunc import TABLE_MAX_N, Instance

log = logging.getLogger("submp")

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VERIFY = 5


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _solver_flags(p):
    p.add_argument("--iters", type=int, default=5000, help="maximum subgradient iterations")
    p.add_argument("--step", choices=("sqrt", "constant"), default="sqrt", help="step rule: c/sqrt(t) or c")
    p.add_argument("--c", type=float, default=1.0, help="step constant")
    p.add_argument("--tol", type=float, default=1e-12, help="early-stop tolerance over a 100-iteration window")
    p.add_argument("--seed", type=int, default=0)


def _params(args) -> SolverParams:
    return SolverParams(max_iters=args.iters, step_rule=args.step, c=args.c, tolerance=args.tol, seed=args.seed)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="submp", description="Submodular multiway partition: relaxation, rounding, verification.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve the convex relaxation")
    p.add_argument("instance")
    _solver_flags(p)
    p.add_argument("--out", help="result file (default: stdout)")
    p.add_argument("--trace", help="write the objective trace as CSV")

    p = sub.add_parser("round", help="round an allocation into a partition")
    p.add_argument("instance")
    p.add_argument("--alloc", help="allocation or result file; solved first when omitted")
    p.add_argument("--scheme", choices=("sym", "sym-isolate", "half"), default="half")
    p.add_argument("--attach", choices=("best", "last"), default="best",
                   help="where the unallocated set goes")
    _solver_flags(p)
    p.add_argument("--out")

    p = sub.add_parser("exact", help="brute-force optimum")
    p.add_argument("instance")
    p.add_argument("--force", action="store_true", help="ignore the enumeration limit")
    p.add_argument("--out")

    p = sub.add_parser("verify", help="check the rounding certificates on an allocation")
    p.add_argument("instance")
    p.add_argument("--alloc", help="allocation or result file; solved first when omitted")
    p.add_argument("--delta", type=float, nargs="+", default=list(DEFAULT_DELTAS))
    _solver_flags(p)
    p.add_argument("--csv", help="write every report as CSV")
    p.add_argument("--out")

    p = sub.add_parser("gap", help="integrality gap over random instances")
    p.add_argument("--family", choices=FAMILIES, default="hypergraph_mc")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--n", type=int, default=7, help="ground-set size")
    p.add_argument("--k", type=int, default=3)
    _solver_flags(p)
    p.add_argument("--csv")
    p.add_argument("--out")

    p = sub.add_parser("kway", help="best k-way partition, trying every terminal set")
    p.add_argument("instance")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--exact", dest="exact", action="store_true", default=None)
    p.add_argument("--approx", dest="exact", action="store_false")
    _solver_flags(p)
    p.add_argument("--out")

    p = sub.add_parser("reduce", help="write the reduced instance")
    p.add_argument("instance")
    p.add_argument("--out")
    return ap


def _emit(text: str, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _allocation(args, inst: Instance, res: ResultFile):
    if args.alloc:
        return load_allocation(args.alloc, inst)
    sol = solve_fractional(inst, _params(args))
    res.seed = args.seed
    return sol.allocation


def cmd_solve(args, res):
    inst = parse_instance(args.instance)
    sol = solve_fractional(inst, _params(args))
    res.seed = args.seed
    res.objective = sol.objective
    res.allocation = sol.allocation.x
    res.extra["iterations"] = str(sol.iterations)
    if args.trace:
        write_trace_csv(args.trace, sol.trace)
    return EXIT_OK


def cmd_round(args, res):
    inst = parse_instance(args.instance)
    x = _allocation(args, inst, res)
    if args.scheme != "half" and not inst.oracle.symmetric:
        raise UnsupportedInstanceError(f"scheme {args.scheme!r} needs a symmetric function")
    if args.scheme == "sym":
        p = round_symmetric(x, attach=args.attach)
    elif args.scheme == "sym-isolate":
        p = round_symmetric_isolate(x)
    else:
        p = round_half(x, attach=args.attach)
    obj = objective(x)
    cost = partition_cost(p)
    res.objective = obj
    res.allocation = x.x
    res.partition = p.assignment.tolist()
    res.cost = cost
    if obj > 0:
        res.ratios["cost/objective"] = cost / obj
    res.extra["scheme"] = args.scheme
    return EXIT_OK


def cmd_exact(args, res):
    inst = parse_instance(args.instance)
    p, val = brute_force_opt(inst, force=args.force)
    res.partition = p.assignment.tolist()
    res.cost = val
    return EXIT_OK


def cmd_verify(args, res):
    inst = parse_instance(args.instance)
    x = _allocation(args, inst, res)
    reports = verify_all(x, tuple(args.delta))
    res.objective = objective(x)
    res.allocation = x.x
    res.residuals = [(r.label, float(r.residual), r.ok) for r in reports]
    if args.csv:
        write_reports_csv(args.csv, reports)
    bad = [r for r in reports if not r.ok]
    for r in bad:
        log.error("verification failed: %s residual %.3g", r.label, r.residual)
    return EXIT_VERIFY if bad else EXIT_OK


def cmd_gap(args, res):
    rows = []
    for idx in range(args.count):
        rng = stream(args.seed, "gap", args.family, idx)
        inst = random_instance(rng, args.family, args.n, args.k)
        g = integrality_gap(inst, _params(args))
        rows.append((idx, g.integral, g.fractional, g.gap))
    res.seed = args.seed
    gaps = [r[3] for r in rows]
    res.ratios["gap_max"] = max(gaps)
    res.ratios["gap_mean"] = float(np.mean(gaps))
    res.extra["family"] = args.family
    res.extra["count"] = str(args.count)
    if args.csv:
        write_csv(args.csv, ["index", "integral", "fractional", "gap"], rows)
    return EXIT_OK


def cmd_kway(args, res):
    inst = parse_instance(args.instance)
    out = solve_kway_by_guessing(inst.oracle, args.k, _params(args), exact=args.exact)
    res.partition = out.partition.assignment.tolist()
    res.cost = out.value
    res.extra["terminals"] = " ".join(map(str, out.terminals))
    res.extra["exact"] = str(out.exact).lower()
    if out.fractional_bound is not None:
        res.objective = out.fractional_bound
        if out.fractional_bound > 0:
            res.ratios["cost/bound"] = out.value / out.fractional_bound
    return EXIT_OK


def cmd_reduce(args, res):
    doc = parse_document(args.instance)
    if doc.family == "node_weighted":
        H = reduce_node_weighted_mc(doc.node_weighted_graph(), doc.terminals)
        out = InstanceDocument("hypergraph_mc", H.n, doc.terminals, H.names, hyperedges=list(H.edges))
        text = format_document(out)
    elif doc.family == "hypergraph_mc":
        from .errors import CapabilityError
        from .fileio import document_to_instance

        inst = document_to_instance(doc)
        if inst.n > TABLE_MAX_N:
            raise CapabilityError(f"reduced instance has {inst.n} elements; tables hold at most {TABLE_MAX_N}")
        text = format_instance(Instance(_as_table(inst), inst.terminals))
    else:
        raise UnsupportedInstanceError(f"nothing to reduce for function {doc.family}")
    _emit(text, args.out)
    return None


def _as_table(inst):
    from .setfunc import ExplicitTable

    f = inst.oracle
    return ExplicitTable(f.ground, tuple(f.table.tolist()))


COMMANDS = {
    "solve": cmd_solve,
    "round": cmd_round,
    "exact": cmd_exact,
    "verify": cmd_verify,
    "gap": cmd_gap,
    "kway": cmd_kway,
    "reduce": cmd_reduce,
}


def run_command(argv) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    res = ResultFile(command=" ".join(["submp"] + [shlex.quote(a) for a in argv]))
    try:
        code = COMMANDS[args.command](args, res)
    except SubmpError as exc:
        print(f"submp: error: {exc}", file=sys.stderr)
        return exc.exit_code
    if code is None:
        return EXIT_OK
    _emit(res.format(), args.out)
    return code


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        return run_command(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
