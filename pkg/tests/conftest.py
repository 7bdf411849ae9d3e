from __future__ import annotations

import functools

import pytest

from pstqudit import catalog
from pstqudit.pipeline import Network, analyze

ACCEPTANCE_LINES: list[str] = []


@functools.lru_cache(maxsize=None)
def network(name: str) -> Network:
    entry = catalog.get(name)
    return analyze(entry.construct(), entry.reference)


@pytest.fixture
def net():
    return network


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
