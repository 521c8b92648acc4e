import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).parent))

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion check")


def pytest_runtest_logreport(report):
    item = _ITEMS.get(report.nodeid)
    if item is None:
        return
    n, title = item
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _ACCEPTANCE[n] = (title, report.outcome)


_ITEMS = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark is not None:
            _ITEMS[item.nodeid] = (mark.args[0], mark.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        title, outcome = _ACCEPTANCE[n]
        word = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {word}  {title}")
