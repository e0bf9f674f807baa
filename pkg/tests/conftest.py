from collections import defaultdict

import pytest

_results = defaultdict(dict)   # criterion -> {test name: passed}
_titles = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m:
            _titles[m.args[0]] = m.args[1]


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _results[m.args[0]][item.name] = rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_results):
        parts = _results[n]
        ok = all(parts.values())
        line = f"criterion {n:>2}  {'PASS' if ok else 'FAIL'}  {_titles[n]}"
        if not ok:
            line += "  [failing: " + ", ".join(k for k, v in parts.items() if not v) + "]"
        tr.write_line(line)
