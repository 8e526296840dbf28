"""Collects one pass/fail line per acceptance criterion and prints them at the end of the run."""

import contextlib
import time

import pytest

_LINES: list[str] = []


class Criterion:
    def __init__(self, number, title):
        self.number = number
        self.title = title
        self.detail = ""
        self.start = time.perf_counter()

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start


@contextlib.contextmanager
def _criterion(number, title):
    c = Criterion(number, title)
    try:
        yield c
    except BaseException as exc:
        line = f"criterion {number:>3} FAIL  {title} ({c.elapsed:.1f} s): {c.detail or type(exc).__name__}"
        _LINES.append(line)
        print(line)
        raise
    line = f"criterion {number:>3} PASS  {title} ({c.elapsed:.1f} s) {c.detail}".rstrip()
    _LINES.append(line)
    print(line)


@pytest.fixture()
def criterion():
    return _criterion


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
