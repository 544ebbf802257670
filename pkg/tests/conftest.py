import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_line():
    def record(criterion: int, passed: bool, summary: str, seconds: float):
        status = "PASS" if passed else "FAIL"
        ACCEPTANCE_LINES.append(f"criterion {criterion}: {status}  {summary}  ({seconds:.2f} s)")
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
