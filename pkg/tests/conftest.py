import numpy as np
import pytest


def brute_tail(N, r, x, M=10**6):
    """sum_{N < |m| <= M} h(x + m)^r using numpy's normalized sinc."""
    m = np.arange(N + 1, M + 1, dtype=float)
    return float(np.sum((np.sinc(x + m) ** 2) ** r) + np.sum((np.sinc(x - m) ** 2) ** r))


def brute_f(x, r, M=10**6):
    """sum_{|m| <= M} h(x + m)^r, smallest terms first."""
    m = np.arange(-M, M + 1, dtype=float)
    terms = (np.sinc(x + m) ** 2) ** r
    return float(np.sum(np.sort(terms)))


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
