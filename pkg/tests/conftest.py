import pytest

from efimovloss import DEFAULT, EfimovParams, sample_table

A0 = DEFAULT.a0


@pytest.fixture(scope="session")
def table():
    return sample_table()


@pytest.fixture
def li6_params():
    return EfimovParams.from_atomic(6.9e-3, 0.016)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
