import time

import pytest

_KEY = "_acceptance_lines"


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion.

    Use as ``with criterion(n, "summary", limit_s) as failures:`` and append
    failure descriptions to ``failures``; the test fails if any were added
    or the time limit was exceeded.
    """
    lines = request.config.__dict__.setdefault(_KEY, [])

    class _Run:
        def __init__(self, number, summary, limit):
            self.number, self.summary, self.limit = number, summary, limit
            self.failures = []

        def __enter__(self):
            self.start = time.perf_counter()
            return self.failures

        def __exit__(self, exc_type, exc, tb):
            elapsed = time.perf_counter() - self.start
            if exc is not None:
                self.failures.append(f"raised {exc_type.__name__}: {exc}")
            if elapsed >= self.limit:
                self.failures.append(f"took {elapsed:.1f} s, limit {self.limit} s")
            status = "FAIL" if self.failures else "PASS"
            line = f"{status} criterion {self.number}: {self.summary} ({elapsed:.1f} s)"
            if self.failures:
                line += " -- " + "; ".join(self.failures)
            lines.append((self.number, line))
            print(line)
            if exc is None and self.failures:
                pytest.fail(line, pytrace=False)
            return False

    return _Run


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.__dict__.get(_KEY)
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
