import numpy as np
import pytest
from hypothesis import settings

from tropispec.core import ConeMatrix, Semiring

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

# Entries log-uniform on [1e-2, 1e2], each zero with probability 0.2.
ENTRY_LOW, ENTRY_HIGH, ZERO_PROB = 1e-2, 1e2, 0.2


def random_entries(rng, n, zero_prob=ZERO_PROB):
    E = np.exp(rng.uniform(np.log(ENTRY_LOW), np.log(ENTRY_HIGH), (n, n)))
    E[rng.random((n, n)) < zero_prob] = 0.0
    return E


def random_matrix(rng, n_max, n_min=1, semiring=Semiring.MAX_TIMES):
    n = int(rng.integers(n_min, n_max + 1))
    return ConeMatrix(random_entries(rng, n), semiring)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion, printed in the summary."""

    def record(number, title, ok, detail=""):
        line = f"criterion {number:>2} [{'PASS' if ok else 'FAIL'}] {title}" + (f": {detail}" if detail else "")
        print(line)
        request.config._acceptance_lines.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
