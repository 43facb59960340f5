import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from submp import ExplicitTable, FractionalAllocation, GraphCut, GroundSet, Instance
from submp.relaxation import terminal_allocation

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", deadline=None, max_examples=500)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# filled by test_acceptance, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def star_instance():
    # c = 0 joined to s1, s2, s3
    f = GraphCut(GroundSet(4, ("c", "s1", "s2", "s3")), ((0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)))
    return Instance(f, (1, 2, 3))


def star_x(inst=None):
    inst = inst or star_instance()
    return FractionalAllocation(terminal_allocation(inst), inst)


def table(n, values):
    return ExplicitTable(GroundSet(n), tuple(values))


def single_edge_instance():
    return Instance(GraphCut(GroundSet(2), ((0, 1, 1.0),)), (0, 1))


def integral_x(inst, labels):
    z = np.zeros((inst.n, inst.k))
    z[np.arange(inst.n), labels] = 1.0
    return FractionalAllocation(z, inst)


@pytest.fixture
def star():
    return star_instance()


@pytest.fixture
def sx():
    return star_x()
