import pytest

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config.addinivalue_line("markers", "slow: long-running simulation test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        prev = _criteria.get(number, (title, True, []))
        details = prev[2] + [v for k, v in rep.user_properties if k == "detail"]
        _criteria[number] = (title, prev[1] and rep.outcome == "passed", details)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok, details = _criteria[number]
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}"
        if details:
            line += " | " + "; ".join(details)
        terminalreporter.write_line(line)
