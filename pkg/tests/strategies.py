"""Hypothesis strategies built on the seeded generators."""

import numpy as np
from hypothesis import strategies as st

from submp import FractionalAllocation
from submp.generators import FAMILIES, random_allocation, random_instance, stream
from submp.relaxation import terminal_allocation

SYMMETRIC_FAMILIES = ("graph_cut", "hypergraph_cut", "sym_table")


@st.composite
def instances(draw, families=FAMILIES, max_n=8):
    fam = draw(st.sampled_from(families))
    k = draw(st.integers(2, 4))
    n = draw(st.integers(k + 1, max(k + 1, max_n)))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_instance(stream(seed, "hyp"), fam, n, k)


@st.composite
def grid_rows(draw, k, m, den):
    """m rows on the simplex with denominator den (lots of ties)."""
    rows = []
    for _ in range(m):
        cuts = sorted(draw(st.lists(st.integers(0, den), min_size=k - 1, max_size=k - 1)))
        rows.append(np.diff([0] + cuts + [den]) / den)
    return np.array(rows).reshape(m, k)


@st.composite
def allocations(draw, families=FAMILIES, max_n=8):
    inst = draw(instances(families, max_n))
    how = draw(st.sampled_from(["dirichlet", "grid", "peaked", "hyp-grid"]))
    if how == "hyp-grid":
        den = draw(st.sampled_from([1, 2, 3, 4, 5, 10]))
        rows = draw(grid_rows(inst.k, len(inst.free), den))
        return FractionalAllocation(terminal_allocation(inst, rows), inst)
    seed = draw(st.integers(0, 2**32 - 1))
    return random_allocation(stream(seed, "hyp-x"), inst, how)
