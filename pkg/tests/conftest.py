import time
from contextlib import contextmanager

import pytest

_LINES: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Context manager recording one PASS/FAIL line per acceptance criterion."""

    @contextmanager
    def check(number: int, title: str, limit_s: float):
        start = time.perf_counter()
        try:
            yield
        except BaseException as exc:
            elapsed = time.perf_counter() - start
            detail = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
            _LINES[number] = f"FAIL  {number:>2}. {title} ({elapsed:.2f} s): {detail}"
            raise
        elapsed = time.perf_counter() - start
        if elapsed > limit_s:
            _LINES[number] = f"FAIL  {number:>2}. {title} ({elapsed:.2f} s, limit {limit_s:g} s)"
            pytest.fail(f"criterion {number} took {elapsed:.2f} s, limit {limit_s:g} s")
        _LINES[number] = f"PASS  {number:>2}. {title} ({elapsed:.2f} s)"

    return check


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_LINES):
        terminalreporter.write_line(_LINES[number])
