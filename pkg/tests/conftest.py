import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ckthermo import LocallyConstantPotential, ZeroOneMatrix

settings.register_profile("ci", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")

GOLDEN = (1 + math.sqrt(5)) / 2


def full(n):
    return ZeroOneMatrix(np.ones((n, n), dtype=int))


@pytest.fixture
def golden():
    return ZeroOneMatrix.from_rows(["11", "10"])


@pytest.fixture
def full2():
    return full(2)


def desk_examples():
    """(name, A, H) for the three named examples."""
    F = full(2)
    G = ZeroOneMatrix.from_rows(["11", "10"])
    return [
        ("full2-euler", F, LocallyConstantPotential.constant(F, math.e)),
        ("full2-N24", F, LocallyConstantPotential(F, 1, [2.0, 4.0])),
        ("golden-euler", G, LocallyConstantPotential.constant(G, math.e)),
    ]


def random_primitive(rng, n):
    while True:
        E = (rng.random((n, n)) < 0.6).astype(int)
        try:
            A = ZeroOneMatrix(E)
        except ValueError:
            continue
        from ckthermo import primitivity_exponent
        if primitivity_exponent(A) is not None:
            return A


def random_potential(rng, A, depth, low=1.1, high=4.0):
    from ckthermo import enumerate_cylinders
    size = len(enumerate_cylinders(A, depth))
    return LocallyConstantPotential(A, depth, rng.uniform(low, high, size))


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
