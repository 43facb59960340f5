import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import single_edge_instance
from strategies import SYMMETRIC_FAMILIES, allocations
from submp import (
    DomainError,
    FractionalAllocation,
    GraphCut,
    GroundSet,
    Instance,
    allocated_integral,
    build_profile,
    expected_cost_half,
    expected_cost_sym,
    objective,
    partition_cost,
    per_label_integral,
    round_half,
    unallocated_integral,
    verify_all,
    verify_charging1,
    verify_charging2,
    verify_delta_identity,
    verify_lambda_identity,
    verify_main_theorem,
    verify_rho_decomposition,
)
from submp.analysis import VerificationReport, verify_unallocated_half, verify_level_sets
from submp.relaxation import terminal_allocation
from submp.rounding import breakpoints, theta_sets


def exact_integral(x, g, lo, hi):
    """Independent oracle: enumerate constancy intervals with plain thresholding."""
    total, prev = 0.0, lo
    for t in breakpoints(x, lo, hi) if lo < hi else []:
        total += (t - prev) * g(theta_sets(x, t))
        prev = t
    return total


def no_free_instance():
    f = GraphCut(GroundSet(3), ((0, 1, 1.0), (1, 2, 2.0)))
    inst = Instance(f, (0, 1, 2))
    return FractionalAllocation(terminal_allocation(inst), inst)


def half_row_x():
    f = GraphCut(GroundSet(3), ((0, 2, 1.0), (1, 2, 1.0)))
    inst = Instance(f, (0, 1))
    z = terminal_allocation(inst)
    z[2] = [0.5, 0.5]
    return FractionalAllocation(z, inst)


class TestProfile:
    def test_star(self, sx):
        p = build_profile(sx)
        assert p.alphas == pytest.approx([1 / 3, 1, 1, 1])
        assert p.order[0] == 0

    def test_integral(self):
        assert (build_profile(no_free_instance()).alphas == 1).all()

    def test_tie_lowest_label(self):
        p = build_profile(half_row_x())
        assert p.alphas[0] == 0.5
        assert p.labels[0] == 0

    @given(allocations())
    def test_sorted_and_argmax(self, x):
        p = build_profile(x)
        assert (np.diff(p.alphas) >= 0).all()
        for j, v in enumerate(p.order):
            assert x.x[v, p.labels[j]] == p.alphas[j] == x.x[v].max()
            assert p.labels[j] == int(np.nonzero(x.x[v] == x.x[v].max())[0][0])


class TestIntegrals:
    def test_star(self, sx):
        assert allocated_integral(sx, 1) == pytest.approx(2.0)
        assert unallocated_integral(sx, 1) == pytest.approx(2.0)
        for i in range(3):
            assert per_label_integral(sx, i, 1) == pytest.approx(4 / 3)

    def test_zero_bound(self, sx):
        assert allocated_integral(sx, 0) == 0
        assert unallocated_integral(sx, 0) == 0
        assert per_label_integral(sx, 0, 0) == 0

    def test_integral_x(self):
        x = no_free_instance()
        f = x.instance.oracle
        assert allocated_integral(x, 1) == f(7)
        assert unallocated_integral(x, 1) == f(0)
        assert per_label_integral(x, 1, 1) == f(2)

    def test_domain(self, sx):
        with pytest.raises(DomainError):
            allocated_integral(sx, 1.5)

    @given(allocations(), st.floats(0, 1))
    def test_against_thresholding(self, x, r):
        f = x.instance.oracle
        assert allocated_integral(x, r) == pytest.approx(
            exact_integral(x, lambda ts: f(ts.allocated), 0, r), abs=1e-9
        )
        assert unallocated_integral(x, r) == pytest.approx(
            exact_integral(x, lambda ts: f(ts.unallocated), 0, r), abs=1e-9
        )
        i = int(r * 1000) % x.k
        assert per_label_integral(x, i, r) == pytest.approx(
            exact_integral(x, lambda ts: f(ts.per_label[i]), 0, r), abs=1e-9
        )

    @given(allocations())
    def test_labels_sum_to_objective(self, x):
        assert sum(per_label_integral(x, i, 1) for i in range(x.k)) == pytest.approx(objective(x), abs=1e-9)

    def test_monte_carlo(self):
        # sampling cross-check on one instance; loose statistical tolerance
        from submp.generators import random_allocation, random_instance, stream

        rng = stream(11, "mc")
        inst = random_instance(rng, "table", 7, 3)
        x = random_allocation(rng, inst)
        f = inst.oracle
        thetas = rng.uniform(0, 1, size=20000)
        thetas = thetas[thetas > 0]
        sets = [theta_sets(x, t) for t in thetas]
        est_u = np.mean([f(s.unallocated) for s in sets])
        est_a = np.mean([f(s.allocated) for s in sets])
        spread = max(f.table) - min(f.table)
        assert abs(est_u - unallocated_integral(x, 1)) < 5 * spread / np.sqrt(len(sets))
        assert abs(est_a - allocated_integral(x, 1)) < 5 * spread / np.sqrt(len(sets))


class TestMainInequality:
    def test_star_delta_one(self, sx):
        r = verify_main_theorem(sx, 1.0)
        assert r.lhs == pytest.approx(4.0)
        assert r.rhs == pytest.approx(4.0)
        assert abs(r.residual) < 1e-12 and r.ok

    def test_star_half(self, sx):
        r = verify_main_theorem(sx, 0.5)
        # 3 * (2/3 + 1/6) on the left; 3 * 1/6 + 3 * 2/3 on the right
        assert r.lhs == pytest.approx(2.5)
        assert r.rhs == pytest.approx(2.5)

    def test_single_edge_integral(self):
        inst = single_edge_instance()
        r = verify_main_theorem(FractionalAllocation(terminal_allocation(inst), inst), 1.0)
        assert r.lhs == 2 and r.rhs == 0 and r.residual == 2

    @pytest.mark.parametrize("d", [0.4, 1.1])
    def test_delta_range(self, sx, d):
        with pytest.raises(DomainError):
            verify_main_theorem(sx, d)

    @given(allocations(), st.floats(0.5, 1.0))
    def test_holds(self, x, d):
        assert verify_main_theorem(x, d).residual >= -1e-9


class TestCharging:
    def test_star_centre(self, sx):
        assert verify_charging1(sx, 1, 1.0).residual >= 0

    def test_no_free(self):
        x = no_free_instance()
        for j in range(1, 4):
            r = verify_charging1(x, j, 1.0)
            assert r.lhs == 0 and r.rhs == 0

    def test_terminal_position(self, sx):
        assert verify_charging1(sx, 4, 0.75).residual >= 0

    def test_charging2(self, sx):
        assert verify_charging2(sx, 1.0).residual >= 0
        r = verify_charging2(sx, 0.0)
        assert r.lhs == 0 and r.rhs == 0

    @given(allocations(), st.sampled_from([0.5, 0.75, 1.0]), st.data())
    def test_hold(self, x, d, data):
        j = data.draw(st.integers(1, x.n))
        assert verify_charging1(x, j, d).residual >= -1e-9
        assert verify_charging2(x, d).residual >= -1e-9


class TestIdentities:
    def test_star(self, sx):
        assert verify_delta_identity(sx).ok
        assert verify_lambda_identity(sx, 0.5).ok
        assert verify_rho_decomposition(sx, 1.0).ok

    def test_integral_telescopes(self):
        x = no_free_instance()
        f = x.instance.oracle
        r = verify_delta_identity(x)
        assert r.ok
        assert r.rhs == pytest.approx(f(7) - f(0))

    def test_lambda_delta_one(self, sx):
        r = verify_lambda_identity(sx, 1.0)
        assert r.lhs == 0 and r.rhs == 0

    def test_rho_integral(self):
        assert verify_rho_decomposition(no_free_instance(), 0.7).ok

    @given(allocations(), st.floats(0.0, 1.0))
    def test_hold(self, x, d):
        for r in (verify_delta_identity(x), verify_lambda_identity(x, d), verify_rho_decomposition(x, d)):
            assert r.ok, (r.name, r.residual, r.detail)

    def test_identity_report_uses_terms(self):
        r = VerificationReport("t", 1.0, 1.0, 0.0, kind="identity", detail={"term_errors": [0.0, 1e-6]})
        assert not r.ok


class TestSymmetricFacts:
    @given(allocations(families=SYMMETRIC_FAMILIES))
    def test_unallocated_half(self, x):
        assert verify_unallocated_half(x).ok

    @given(allocations(families=SYMMETRIC_FAMILIES), st.lists(st.floats(0.0, 1.0, exclude_min=True), max_size=5))
    def test_complement_symmetry(self, x, thetas):
        f = x.instance.oracle
        for t in thetas:
            U = theta_sets(x, t).unallocated
            assert f(U) == pytest.approx(f(f.ground.full & ~U), abs=1e-9)


@given(allocations(), st.lists(st.floats(0.0, 1.0, exclude_min=True), min_size=20, max_size=20))
def test_level_sets_interval_form(x, thetas):
    assert verify_level_sets(x, thetas).ok


class TestExpectedCosts:
    def test_star(self, sx):
        assert expected_cost_half(sx) == pytest.approx(4.0)
        assert expected_cost_sym(sx) <= 6.0

    def test_integral(self):
        x = no_free_instance()
        cost = partition_cost(round_half(x))
        assert expected_cost_half(x) == cost
        assert expected_cost_sym(x) == cost

    @given(allocations(families=SYMMETRIC_FAMILIES))
    def test_sym_bound(self, x):
        assert expected_cost_sym(x) <= 1.5 * objective(x) + 1e-9

    @given(allocations())
    def test_half_bound(self, x):
        assert expected_cost_half(x) <= 2 * objective(x) + 1e-9


@given(allocations())
def test_verify_all_clean(x):
    bad = [r.label for r in verify_all(x) if not r.ok]
    assert not bad
