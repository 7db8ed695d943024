import pytest

_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record ``(number, passed, detail)`` for the acceptance summary."""

    def record(number, passed, detail=""):
        _CRITERIA.setdefault(number, []).append((bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        for passed, detail in _CRITERIA[number]:
            status = "PASS" if passed else "FAIL"
            terminalreporter.write_line(f"criterion {number}: {status}  {detail}")
