import _criteria


def pytest_terminal_summary(terminalreporter):
    if _criteria.LINES:
        terminalreporter.section("acceptance criteria")
        for line in _criteria.LINES:
            terminalreporter.write_line(line)
