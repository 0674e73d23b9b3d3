import pytest

from sweepdyn.reproduce import preset_config, simulate

_CACHE = {}


def preset_run(name):
    """Simulated preset trajectory, computed once per session."""
    if name not in _CACHE:
        _CACHE[name] = simulate(preset_config(name))
    return _CACHE[name]


@pytest.fixture(scope="session")
def baseline():
    return preset_run("tk-baseline")


ACCEPTANCE_LINES = []


def record(criterion, ok, detail):
    """Log one acceptance verdict; the lines are repeated in the run summary."""
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} | {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
