import functools

import pytest

from pulsedrive.circuit import simulate
from pulsedrive.metrics import evaluate
from pulsedrive.runner import bundled
from pulsedrive.scenario import load_scenario


@functools.lru_cache(maxsize=None)
def cached_run(name: str, overrides: tuple[str, ...] = ()):
    """Simulate a bundled scenario once per session."""
    sc = load_scenario(bundled(name), list(overrides))
    trace = simulate(sc)
    return trace, evaluate(trace)


@pytest.fixture
def run_bundled():
    return cached_run


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
