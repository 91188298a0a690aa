from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"


@pytest.fixture
def fixture20_path():
    return DATA / "fixture20.jsonl"


@pytest.fixture
def golden_scores_path():
    return DATA / "golden_scores.csv"


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py" not in getattr(rep, "nodeid", "") or rep.when != "call":
                continue
            label = getattr(rep, "criterion", None) or rep.nodeid.split("::")[-1]
            lines.append((rep.nodeid, f"{'PASS' if outcome == 'passed' else 'FAIL'}  {label}"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker:
        rep.criterion = marker.args[0]
