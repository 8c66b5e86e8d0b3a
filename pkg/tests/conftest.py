import pytest

_LINES = []


@pytest.fixture
def acceptance_line():
    """Record one ``[PASS]/[FAIL] criterion ...`` line; printed in the terminal summary."""

    def record(label: str, ok: bool, detail: str):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
        _LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
