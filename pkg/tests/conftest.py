"""Shared test plumbing: acceptance-criterion reporting.

Criterion tests register one line each; the table is printed in the terminal
summary so it stays visible regardless of output capture.
"""

_CRITERION_LINES = []


def record_criterion(name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    line = f"[{status}] {name}" + (f" | {detail}" if detail else "")
    _CRITERION_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERION_LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in _CRITERION_LINES:
        terminalreporter.write_line(line)
