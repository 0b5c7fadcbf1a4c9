import sys

import pytest

from ecosplit.config import default_scenario


@pytest.fixture(scope="session")
def scenario():
    return default_scenario()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # replay the acceptance verdict lines after the test tally so the
    # measured numbers land in the run log even with capture on
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "VERDICT_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
