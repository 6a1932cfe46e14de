import zlib

import pytest

from trigraph.rng import make_rng


@pytest.fixture
def rng(request):
    # per-test stream so tests stay independent of collection order
    return make_rng(20261016, zlib.crc32(request.node.name.encode()))


def within_sigma(observed, expected, sigma, k=4.0):
    return abs(observed - expected) <= k * sigma


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
