import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("crcartan", max_examples=100, deadline=None, derandomize=True)
settings.load_profile("crcartan")

ACCEPTANCE: dict = {}


@pytest.fixture(scope="session")
def reduction():
    from crcartan.reduce import run_reduction
    return run_reduction()


@pytest.fixture(scope="session")
def connection(reduction):
    from crcartan.cartan import connection_form
    return connection_form(reduction.final)


@pytest.fixture(scope="session")
def secondary():
    from crcartan.exterior import derive_secondary_brackets
    return derive_secondary_brackets()


@pytest.fixture(scope="session")
def concrete():
    from cr_oracle import sample_structure
    return sample_structure()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
