"""Collects one status line per acceptance criterion and prints them at
the end of the session."""

_LINES: dict[int, str] = {}


def record(number: int, ok: bool, text: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}: {text}"
    _LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_LINES):
        terminalreporter.write_line(_LINES[n])
