import collections

import pytest

# criterion number -> (passed, detail); filled in by tests/test_acceptance.py
_RESULTS: dict = collections.OrderedDict()


@pytest.fixture
def acceptance_log():
    def record(number: int, passed: bool, detail: str = "") -> None:
        _RESULTS[number] = (bool(passed), detail)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        passed, detail = _RESULTS[number]
        status = "PASS" if passed else "FAIL"
        line = f"ACCEPTANCE {number}: {status}"
        if detail:
            line += f" - {detail}"
        terminalreporter.write_line(line)
