import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bsemicircular import identity_map, make_algebra, make_space, random_symmetric_cp, scalar_algebra

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def algebra_zoo():
    return {
        "full2": make_algebra("full", dim=2),
        "diag3": make_algebra("diagonal", trace_weights=[0.5, 0.3, 0.2]),
        "blocks12": make_algebra("blocks", block_sizes=[1, 2], trace_weights=[0.4, 0.6]),
    }


@pytest.fixture(params=sorted(algebra_zoo()))
def setting(request):
    """(algebra, two symmetric covariances, Fock space of depth 6)."""
    alg = algebra_zoo()[request.param]
    rng = np.random.default_rng(sorted(algebra_zoo()).index(request.param) + 11)
    etas = [random_symmetric_cp(alg, rng) for _ in range(2)]
    return alg, etas, make_space(alg, etas, 6)


@pytest.fixture
def scalar_setting():
    alg = scalar_algebra()
    eta = identity_map(alg)
    return alg, [eta], make_space(alg, [eta], 8)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "VERDICTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
