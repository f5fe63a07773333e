import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from eitsim.params import dimensionless_params  # noqa: E402


@pytest.fixture
def canon():
    """Canonical dimensionless point: gamma_ab = Omega_c = 1, gamma_bc = 0.01, kappa = 1."""
    return dimensionless_params()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
