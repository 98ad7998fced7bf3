import pytest

ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def record():
    """Store one pass/fail line per acceptance criterion."""

    def _record(criterion: str, passed: bool, detail: str) -> None:
        ACCEPTANCE_RESULTS[criterion] = (bool(passed), detail)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[criterion]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {criterion}: {detail}")
