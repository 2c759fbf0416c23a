import pytest

ACCEPTANCE: dict[int, tuple[str, bool]] = {}


@pytest.fixture
def criterion():
    """Record the verdict of an acceptance criterion for the end-of-run summary."""

    def record(number: int, title: str, ok: bool) -> bool:
        prev = ACCEPTANCE.get(number)
        ACCEPTANCE[number] = (title, ok and (prev is None or prev[1]))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {n}: {title}")
