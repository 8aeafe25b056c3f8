import math

import pytest

from eitflash.medium import MediumParams

ACCEPTANCE_LINES = []


@pytest.fixture
def two_level():
    return MediumParams(b0=200.0)


@pytest.fixture
def lambda_medium():
    return MediumParams(b0=200.0, omega_c=0.5)


@pytest.fixture
def record_acceptance():
    """Collect one PASS/FAIL line per acceptance criterion."""

    def record(number, ok, detail):
        line = f"[acceptance {number}] {'PASS' if ok else 'FAIL'}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
