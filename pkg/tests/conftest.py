import pytest

_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record an acceptance result, then assert it."""

    def record(number, title, measured, bound, passed):
        status = "PASS" if passed else "FAIL"
        _CRITERIA[number] = f"criterion {number:>2} {status}  {title}: {measured} (bound {bound})"
        assert passed, _CRITERIA[number]

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[number])
