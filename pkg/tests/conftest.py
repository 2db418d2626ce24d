import pytest

from lossspec.stats import TestSpec

# a statistic descriptor, not a test case; silence pytest's name-based pickup
TestSpec.__test__ = False


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Collector for one human-readable line per acceptance criterion."""
    lines = getattr(request.config, "_acceptance_lines", None)
    if lines is None:
        lines = []
        request.config._acceptance_lines = lines
    return lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines):
        terminalreporter.write_line(line)
