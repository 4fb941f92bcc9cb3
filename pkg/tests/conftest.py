import pytest

ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record_criterion():
    """Record pass/fail of an acceptance criterion for the terminal summary."""

    def record(number: int, passed: bool, text: str):
        ACCEPTANCE_RESULTS[number] = (passed, text)
        print(f"acceptance {number}: {'PASS' if passed else 'FAIL'} - {text}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        passed, text = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {text}")
