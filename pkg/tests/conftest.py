import json
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"
_ACCEPTANCE = []


@pytest.fixture(scope="session")
def oracles():
    with open(DATA / "oracles.json") as fh:
        return json.load(fh)


@pytest.fixture
def criterion():
    """Record one pass/fail line for an acceptance criterion, then assert it."""

    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE.append((number, line))
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE):
        terminalreporter.write_line(line)
