import numpy as np
import pytest

from shadowlab.sampling import RngStream


def random_complex(rng, n, m=None):
    m = n if m is None else m
    return rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))


def random_hermitian(rng, n):
    g = random_complex(rng, n)
    return (g + g.conj().T) / 2


@pytest.fixture
def nprng():
    return np.random.default_rng(20240611)


@pytest.fixture
def stream():
    return RngStream(12345)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def report(request):
    """Record one acceptance line; all lines are echoed in the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(criterion, ok, detail):
        line = f"criterion {criterion:>4}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
