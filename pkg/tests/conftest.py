import pathlib

import pytest

from valnet import parse_problem

ROOT = pathlib.Path(__file__).resolve().parent.parent
WILDCATTER_PATH = ROOT / "problems" / "wildcatter.vn"

# Verdict lines recorded by the acceptance suite, printed after the run.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def wildcatter_text():
    return WILDCATTER_PATH.read_text()


@pytest.fixture(scope="session")
def wildcatter(wildcatter_text):
    return parse_problem(wildcatter_text)
