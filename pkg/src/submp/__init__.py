"""Submodular multiway partition: Lovász-extension relaxation, threshold
rounding and exact certificate checks for small instances."""

from .errors import (
    CapabilityError,
    DomainError,
    FeasibilityError,
    MalformedInputError,
    ParameterError,
    ParseError,
    PreconditionError,
    SubmpError,
    UnsupportedInstanceError,
    VerificationError,
)
from .setfunc import (
    ExplicitTable,
    GraphCut,
    GroundSet,
    Hypergraph,
    HypergraphCut,
    HypergraphMCReduced,
    Instance,
    SetFunction,
    check_submodular,
    check_symmetric,
    evaluate,
    lovasz_extension,
    lovasz_subgradient,
    marginal,
)
from .reductions import NodeWeightedGraph, reduce_hypergraph_mc, reduce_node_weighted_mc
from .relaxation import (
    FractionalAllocation,
    SolverParams,
    SolveResult,
    grid_search_oracle,
    objective,
    project_row,
    solve_fractional,
)
from .rounding import (
    Partition,
    breakpoints,
    partition_cost,
    round_half,
    round_symmetric,
    round_symmetric_isolate,
    theta_sets,
    uncross,
)
from .analysis import (
    allocated_integral,
    build_profile,
    expected_cost_half,
    expected_cost_sym,
    per_label_integral,
    unallocated_integral,
    verify_all,
    verify_charging1,
    verify_charging2,
    verify_delta_identity,
    verify_lambda_identity,
    verify_main_theorem,
    verify_rho_decomposition,
)
from .exact import brute_force_opt, integrality_gap, solve_kway_by_guessing
from .fileio import format_instance, load_allocation, parse_instance

__version__ = "0.1.0"
