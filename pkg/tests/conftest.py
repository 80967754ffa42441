import json

import numpy as np
import pytest

from handsoff import LtiSystem

# Frozen reference values, computed once with mpmath at 30 digits.
E5 = 148.413159102576603421115580041
X1 = 1.98652410600182906580672790315        # 2 (1 - e^-5)
V_999 = 4.86249001825316821192363605179     # -log(1 - 0.999 (1 - e^-5))
LN2 = 0.693147180559945309417232121458


@pytest.fixture(scope="session")
def scalar():
    """dx/dt = x + 2u on [0, 5]."""
    return LtiSystem([[1.0]], [2.0], 5.0)


@pytest.fixture(scope="session")
def oscillator():
    return LtiSystem([[0.0, 1.0], [-1.0, 0.0]], [0.0, 1.0], 2 * np.pi)


@pytest.fixture(scope="session")
def double_integrator():
    return LtiSystem([[0.0, 1.0], [0.0, 0.0]], [0.0, 1.0], 2.0)


def write_system(path, sys):
    path.write_text(json.dumps(sys.to_dict()))
    return str(path)


@pytest.fixture
def system_file(tmp_path):
    def make(sys, name="sys.json"):
        return write_system(tmp_path / name, sys)
    return make


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance line; it is echoed in the terminal summary."""
    def record(number, name, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number} ({name}): {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[2])):
            terminalreporter.write_line(line)
