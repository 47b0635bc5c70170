"""Shared test plumbing: a collector so acceptance checks can print one
summary line each at the end of the run."""

_LINES = []


def record(line):
    _LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _LINES:
        terminalreporter.write_sep("=", "acceptance summary")
        for line in _LINES:
            terminalreporter.write_line(line)
