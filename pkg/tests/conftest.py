import pytest

from _helpers import reference_coupling, reference_qubit, reference_resonator

_ACCEPTANCE_LINES = []


@pytest.fixture
def qubit():
    return reference_qubit()


@pytest.fixture
def resonator():
    return reference_resonator()


@pytest.fixture
def coupling():
    return reference_coupling()


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
