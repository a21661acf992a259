import pytest

_CRITERION_LINES = []


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion, then enforce it."""

    def record(num: int, name: str, ok: bool, detail: str) -> None:
        line = f"criterion {num} ({name}): {'PASS' if ok else 'FAIL'} -- {detail}"
        _CRITERION_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERION_LINES:
            terminalreporter.write_line(line)
