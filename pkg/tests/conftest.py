from __future__ import annotations

import sys
from pathlib import Path

import pytest

from mitiplan.fixtures import paper_v13_catalog, paper_v13_weights
from mitiplan.matrix import build_decision_matrix

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def v13_catalog():
    return paper_v13_catalog()


@pytest.fixture(scope="session")
def v13_weights():
    return paper_v13_weights()


@pytest.fixture(scope="session")
def v13_matrix(v13_catalog, v13_weights):
    return build_decision_matrix(v13_catalog, v13_weights)


def pytest_terminal_summary(terminalreporter):
    """Print the acceptance verdict lines after the run."""
    try:
        from acceptance_report import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
