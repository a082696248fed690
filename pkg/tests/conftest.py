import numpy as np
import pytest

from ramanpair import correlation as corr
from ramanpair.model import paper_defaults

# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE_LINES = []

FIG6_TAU = np.linspace(-2e-6, 2e-6, 4001)
FIG6_L = 0.05


@pytest.fixture(scope="session")
def params():
    return paper_defaults()


def _fig6(k):
    p = paper_defaults().with_k(k)
    s = corr.g2_cross(FIG6_TAU, FIG6_L, None, p)
    return corr.coincidence_rate(corr.normalize_g2(s))


@pytest.fixture(scope="session")
def fig6_low():
    return _fig6(2e8)


@pytest.fixture(scope="session")
def fig6_high():
    return _fig6(3e9)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
