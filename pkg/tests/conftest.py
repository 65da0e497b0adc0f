import cmath
import math

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE_LINES = {}

# lam = S(-3i): attracting fixed point 0.866(1 - i), multiplier 6/sinh 3
SHELL1_LAM = complex(0.95679, 0.95679)


@pytest.fixture
def acceptance_lines():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])


def close(a, b, tol):
    return abs(complex(a) - complex(b)) <= tol


def images8(lam):
    """The eight symmetry images of lam in a fixed order."""
    c = lam.conjugate()
    return [lam, -lam, 1j * lam, -1j * lam, c, -c, 1j * c, -1j * c]
