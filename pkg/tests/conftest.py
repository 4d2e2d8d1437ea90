import pytest

from nrthreat.grid import Direction, GridConfig, build_grid


@pytest.fixture(scope="session")
def dl_grid():
    return build_grid(GridConfig())


@pytest.fixture(scope="session")
def ul_grid():
    return build_grid(GridConfig(direction=Direction.UPLINK))


ACCEPTANCE_LINES = pytest.StashKey[list]()


@pytest.fixture
def report(request):
    """Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE_LINES, [])
    return lines.append


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
