import numpy as np
import pytest

from qgcnn.graphconv import cached_pixel_adjacency


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def adjacency():
    return cached_pixel_adjacency(32, 32)


def random_state(rng, n):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """``verdict(criterion, ok, detail)`` records a PASS/FAIL line, then asserts."""
    log = request.config.stash.setdefault(_ACCEPTANCE, [])

    def check(criterion, ok, detail=""):
        log.append(f"{'PASS' if ok else 'FAIL'}  criterion {criterion}: {detail}")
        assert ok, f"criterion {criterion}: {detail}"

    return check


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
