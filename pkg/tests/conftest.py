import _acceptance_log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_log.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for index in sorted(_acceptance_log.RESULTS):
        description, passed = _acceptance_log.RESULTS[index]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {index:2d} [{status}] {description}")
