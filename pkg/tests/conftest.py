"""Collect one verdict per acceptance criterion and print them at the end."""

import pytest

_verdicts: dict[str, bool] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    label = mark.args[0]
    ok = rep.passed
    _verdicts[label] = _verdicts.get(label, True) and ok


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_verdicts, key=lambda s: int(s.split()[0])):
        terminalreporter.write_line(f"{'PASS' if _verdicts[label] else 'FAIL'}  {label}")
