import pytest

from artifact import fixtures
from artifact.stabilization import Pipeline
from artifact.ambient import explicit_reduction


@pytest.fixture
def fix_a():
    return fixtures.fix_a()


@pytest.fixture(scope="session")
def fix_a_pipeline():
    atlas = fixtures.fix_a_amb()
    return Pipeline(atlas, explicit_reduction(fixtures.FIX_A_AMB_REDUCTION))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
