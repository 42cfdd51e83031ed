import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): one numbered acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark:
            number, title = mark.args
            _criteria[number] = {"title": title, "outcome": "NOT RUN", "nodeid": item.nodeid}


def pytest_runtest_logreport(report):
    for entry in _criteria.values():
        if entry["nodeid"] != report.nodeid:
            continue
        if report.failed:
            entry["outcome"] = "FAIL"
        elif report.when == "call" and report.passed and entry["outcome"] != "FAIL":
            entry["outcome"] = "PASS"
        elif report.skipped:
            entry["outcome"] = "SKIP"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        terminalreporter.write_line(f"{entry['outcome']:<4} criterion {number}: {entry['title']}")
