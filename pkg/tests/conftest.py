from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from worlds import tiny_scenario  # noqa: E402

# name -> list of outcomes, filled from tests marked ``criterion`` (see test_acceptance.py)
ACCEPTANCE: dict[str, list[bool]] = {}


@pytest.fixture
def tiny():
    return tiny_scenario()


@pytest.fixture
def criterion(request):
    """Register the calling test as evidence for a named acceptance criterion."""
    name = request.node.get_closest_marker("criterion").args[0]
    ACCEPTANCE.setdefault(name, [])
    yield name


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    outcomes = ACCEPTANCE.setdefault(marker.args[0], [])
    if rep.skipped:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        outcomes.append(rep.passed)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): evidence for an acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcomes in ACCEPTANCE.items():
        if not outcomes:
            status = "SKIP"
        else:
            status = "PASS" if all(outcomes) else "FAIL"
        terminalreporter.write_line(f"{status}  {name}  ({sum(outcomes)}/{len(outcomes)} checks)")
