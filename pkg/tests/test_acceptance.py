"""One test per acceptance criterion; each prints a PASS/FAIL line.

The lines are also collected and printed in the terminal summary.
"""

import time

import pytest

from conftest import ACCEPTANCE_LINES
from submp import acceptance as A


@pytest.fixture(scope="module")
def sweep():
    t0 = time.perf_counter()
    cases = A.build_sweep(A.SEED)
    return cases, time.perf_counter() - t0


def _report(result):
    line = result.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    return result


def test_criterion_01_main_inequality(sweep):
    cases, elapsed = sweep
    r = _report(A.criterion_1(cases))
    assert len(cases) >= 100
    assert all(len(c.allocations) >= 10 for c in cases)
    assert {c.family for c in cases} == set(A.FAMILIES)
    assert r.passed, r.failures[:5]
    assert elapsed < 120, f"sweep took {elapsed:.1f}s"


def test_criterion_02_identities(sweep):
    r = _report(A.criterion_2(sweep[0]))
    assert r.passed, r.failures[:5]


def test_criterion_03_symmetric_bound(sweep):
    r = _report(A.criterion_3(sweep[0]))
    assert r.passed, r.failures[:5]


def test_criterion_04_half_bound(sweep):
    r = _report(A.criterion_4(sweep[0]))
    assert r.passed, r.failures[:5]


def test_criterion_05_unallocated_half(sweep):
    r = _report(A.criterion_5(sweep[0]))
    assert r.passed, r.failures[:5]


def test_criterion_06_uncrossing():
    r = _report(A.criterion_6())
    assert r.passed, r.failures[:5]


def test_criterion_07_graph_cut_l1():
    r = _report(A.criterion_7())
    assert r.passed, r.failures[:5]


def test_criterion_08_reductions():
    r = _report(A.criterion_8())
    assert r.passed, r.failures[:5]


def test_criterion_09_solver_quality(sweep):
    r = _report(A.criterion_9(sweep[0]))
    assert r.passed, r.failures[:5]


def test_criterion_10_isolate_report(sweep):
    # reported only; misses are listed but never fail the build
    r = _report(A.criterion_10(sweep[0]))
    for miss in r.failures:
        print("  miss:", miss)
    assert r.passed
