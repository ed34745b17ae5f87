"""Shared pytest configuration.

The acceptance module registers one line per criterion; the hook below
prints them as a block at the end of the run so the pass/fail status of
each criterion is visible even when per-test output is captured.
"""

ACCEPTANCE_LINES = []


def record_criterion(number: int, description: str, passed: bool) -> None:
    status = "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES.append(f"criterion {number:02d} {status}  {description}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
