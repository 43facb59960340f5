import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import integral_x, single_edge_instance, star_instance, table
from strategies import SYMMETRIC_FAMILIES, allocations, instances
from submp import (
    DomainError,
    FractionalAllocation,
    GraphCut,
    GroundSet,
    Hypergraph,
    Instance,
    Partition,
    UnsupportedInstanceError,
    breakpoints,
    objective,
    partition_cost,
    reduce_hypergraph_mc,
    round_half,
    round_symmetric,
    round_symmetric_isolate,
    theta_sets,
    uncross,
)
from submp.relaxation import terminal_allocation
from submp.rounding import half_outcome, symmetric_outcome

C, S1, S2, S3 = 1, 2, 4, 8  # star masks


class TestThetaSets:
    def test_star_above_third(self, sx):
        ts = theta_sets(sx, 0.5)
        assert ts.per_label == (S1, S2, S3)
        assert ts.unallocated == C

    def test_star_below_third(self, sx):
        ts = theta_sets(sx, 0.2)
        assert ts.per_label == (S1 | C, S2 | C, S3 | C)
        assert ts.unallocated == 0

    @given(allocations())
    def test_theta_one(self, x):
        ts = theta_sets(x, 1.0)
        for i, s in enumerate(x.instance.terminals):
            assert ts.per_label[i] >> s & 1
            for v in range(x.n):
                assert (ts.per_label[i] >> v & 1) == (x.x[v, i] == 1.0)

    @pytest.mark.parametrize("theta", [0.0, -0.1, 1.0001])
    def test_domain(self, sx, theta):
        with pytest.raises(DomainError):
            theta_sets(sx, theta)

    @given(allocations(), st.floats(0.5, 1.0, exclude_min=True))
    def test_disjoint_above_half(self, x, theta):
        ts = theta_sets(x, theta)
        seen = 0
        for m in ts.per_label:
            assert m & seen == 0
            seen |= m


class TestBreakpoints:
    def test_star(self, sx):
        assert breakpoints(sx, 0, 1) == pytest.approx([1 / 3, 1])
        assert breakpoints(sx, 0.5, 1) == [1.0]

    def test_dedup(self):
        f = GraphCut(GroundSet(3), ())
        inst = Instance(f, (0, 1))
        z = terminal_allocation(inst)
        z[2] = [0.6, 0.4]
        x = FractionalAllocation(z, inst)
        assert breakpoints(x, 0, 1) == pytest.approx([0.4, 0.6, 1.0])

    @given(allocations())
    def test_level_sets_constant_between(self, x):
        # sets at the midpoint of each interval equal the sets at its right end
        pts = breakpoints(x, 0.0, 1.0)
        prev = 0.0
        for t in pts:
            mid = (prev + t) / 2
            if prev < mid < t:  # adjacent floats have no interior point
                assert theta_sets(x, mid).per_label == theta_sets(x, t).per_label
            prev = t


class TestUncross:
    def test_disjoint_unchanged(self):
        f = star_instance().oracle
        assert uncross([S1, S2, S3 | C], f) == [S1, S2, S3 | C]

    def test_path(self):
        # s1 - v - s2 with v = 1
        f = GraphCut(GroundSet(3), ((0, 1, 1.0), (1, 2, 1.0)))
        out = uncross([0b011, 0b110], f)
        assert out[0] & out[1] == 0
        assert out[0] | out[1] == 0b111
        assert f(out[0]) + f(out[1]) <= 2

    def test_identical_full_sets(self):
        f = GraphCut(GroundSet(3), ((0, 1, 1.0),))
        out = uncross([0b111, 0b111], f)
        assert sorted(out) == [0, 0b111]

    def test_asymmetric_warns(self):
        f = table(2, (0, 1, 1, 1))
        with pytest.warns(UserWarning):
            uncross([1, 3], f)

    @given(instances(families=SYMMETRIC_FAMILIES), st.data())
    def test_properties(self, inst, data):
        f = inst.oracle
        sets = data.draw(st.lists(st.integers(0, (1 << f.n) - 1), min_size=1, max_size=5))
        out = uncross(sets, f)
        u_in = u_out = 0
        for s in sets:
            u_in |= s
        for s in out:
            u_out |= s
        assert u_in == u_out
        for i in range(len(out)):
            assert out[i] & ~sets[i] == 0
            for j in range(i + 1, len(out)):
                assert out[i] & out[j] == 0
        assert sum(f(s) for s in out) <= sum(f(s) for s in sets) + 1e-9


class TestRoundSymmetric:
    def test_star(self, sx):
        p = round_symmetric(sx)
        assert partition_cost(p) == 4
        # c joins exactly one terminal; which one depends on the winning threshold
        assert p.assignment.tolist()[1:] == [0, 1, 2]

    def test_no_free(self):
        f = GraphCut(GroundSet(3), ((0, 1, 1.0), (1, 2, 1.0)))
        inst = Instance(f, (0, 1, 2))
        p = round_symmetric(FractionalAllocation(terminal_allocation(inst), inst))
        assert p.assignment.tolist() == [0, 1, 2]
        assert partition_cost(p) == 4

    @given(instances(families=SYMMETRIC_FAMILIES), st.data())
    def test_integral_reproduced(self, inst, data):
        labels = [data.draw(st.integers(0, inst.k - 1)) for _ in range(inst.n)]
        for i, s in enumerate(inst.terminals):
            labels[s] = i
        x = integral_x(inst, labels)
        for attach in ("last", "best"):
            p = round_symmetric(x, attach=attach)
            assert partition_cost(p) <= objective(x) + 1e-9
        assert round_symmetric(x, attach="last").assignment.tolist() == labels

    def test_asymmetric_refused(self):
        inst = reduce_hypergraph_mc(Hypergraph(2, (((0, 1), 1.0),)), (0, 1))
        x = FractionalAllocation(terminal_allocation(inst), inst)
        with pytest.raises(UnsupportedInstanceError):
            round_symmetric(x)
        with pytest.raises(UnsupportedInstanceError):
            round_symmetric_isolate(x)

    def test_bad_attach(self, sx):
        with pytest.raises(ValueError):
            round_symmetric(sx, attach="first")

    @given(allocations(families=SYMMETRIC_FAMILIES))
    def test_best_breakpoint(self, x):
        # derandomised choice is the minimum over every breakpoint outcome
        costs = [symmetric_outcome(x, t, "best")[0] for t in breakpoints(x, 0, 1)]
        assert partition_cost(round_symmetric(x)) == pytest.approx(min(costs), abs=1e-9)
        assert partition_cost(round_symmetric(x)) <= 1.5 * objective(x) + 1e-9


class TestIsolate:
    def test_star(self, sx):
        assert partition_cost(round_symmetric_isolate(sx)) == 4

    def test_single_edge_k2(self):
        inst = single_edge_instance()
        p = round_symmetric_isolate(FractionalAllocation(terminal_allocation(inst), inst))
        assert partition_cost(p) == 2

    @given(instances(families=SYMMETRIC_FAMILIES), st.data())
    def test_integral_no_worse(self, inst, data):
        labels = [data.draw(st.integers(0, inst.k - 1)) for _ in range(inst.n)]
        for i, s in enumerate(inst.terminals):
            labels[s] = i
        x = integral_x(inst, labels)
        assert partition_cost(round_symmetric_isolate(x)) <= objective(x) + 1e-9


class TestRoundHalf:
    def test_star(self, sx):
        p = round_half(sx)
        assert p.assignment.tolist() == [2, 0, 1, 2]
        assert partition_cost(p) == 4

    def test_mc_single_hyperedge(self):
        inst = reduce_hypergraph_mc(Hypergraph(2, (((0, 1), 1.0),)), (0, 1))
        x = FractionalAllocation(terminal_allocation(inst), inst)
        assert partition_cost(round_half(x)) == 1.0

    @given(allocations())
    def test_integral_and_bound(self, x):
        obj = objective(x)
        for attach in ("last", "best"):
            assert partition_cost(round_half(x, attach=attach)) <= 2 * obj + 1e-9
        p = round_half(x)
        costs = [half_outcome(x, t, "best")[0] for t in breakpoints(x, 0.5, 1)]
        assert partition_cost(p) == pytest.approx(min(costs), abs=1e-9)

    @given(instances(), st.data())
    def test_integral_encoded(self, inst, data):
        labels = [data.draw(st.integers(0, inst.k - 1)) for _ in range(inst.n)]
        for i, s in enumerate(inst.terminals):
            labels[s] = i
        x = integral_x(inst, labels)
        assert round_half(x, attach="last").assignment.tolist() == labels

    @given(allocations())
    def test_isolate_flag_gives_partition(self, x):
        p = round_half(x, isolate_heaviest=True)
        assert p.assignment.shape == (x.n,)

    def test_negative_oracle_refused(self):
        inst = Instance(table(2, (-1, 0, 0, 0)), (0, 1))
        with pytest.raises(UnsupportedInstanceError):
            round_half(FractionalAllocation(terminal_allocation(inst), inst))


class TestPartition:
    def test_star_cost(self, star):
        assert partition_cost(Partition(np.array([2, 0, 1, 2]), star)) == 4

    def test_one_part(self):
        f = GraphCut(GroundSet(3), ((0, 1, 1.0),))
        inst = Instance(f, (0,))
        assert partition_cost(Partition(np.zeros(3, dtype=int), inst)) == f(7)

    def test_triangle(self):
        f = GraphCut(GroundSet(3), ((0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)))
        inst = Instance(f, (0, 1, 2))
        assert partition_cost(Partition(np.arange(3), inst)) == 6

    def test_validation(self, star):
        from submp import MalformedInputError

        with pytest.raises(MalformedInputError):
            Partition(np.array([0, 1, 1, 2]), star)
        with pytest.raises(MalformedInputError):
            Partition(np.array([0, 0, 1, 3]), star)
        with pytest.raises(MalformedInputError):
            Partition.from_parts([S1, S2 | C, S3 | C], star)
