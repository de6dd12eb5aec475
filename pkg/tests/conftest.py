import pytest
from hypothesis import settings

from corsol.coefficient import catalog

settings.register_profile("corsol", deadline=None, derandomize=True, max_examples=40)
settings.load_profile("corsol")

CATALOG_NAMES = ("constant_one", "gaussian_osc", "exp_osc", "one_plus_cos")

# filled by test_acceptance.py, echoed after the run
ACCEPTANCE_LINES = {}


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


@pytest.fixture(scope="session")
def coefs():
    return {n: catalog(n) for n in CATALOG_NAMES}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
