import pytest

_ACCEPTANCE: list[tuple[str, bool, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: one acceptance criterion")
    config.addinivalue_line("markers", "slow: long-running statistical test")


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    for key, value in report.user_properties:
        if key == "acceptance":
            _ACCEPTANCE.append(value)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
