import pytest

import helpers
from rankprice import build_grid

_acceptance_lines = []


@pytest.fixture
def table1():
    return helpers.table1()


@pytest.fixture
def table1_grid(table1):
    return build_grid(table1)


@pytest.fixture
def table1_mod():
    return helpers.table1_mod()


def record_acceptance(line: str) -> None:
    _acceptance_lines.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
