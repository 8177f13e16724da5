import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import re

_CRITERIA = {}


def pytest_runtest_logreport(report):
    match = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)(\[.*\])?", report.nodeid)
    if not match or report.when != "call" and not (report.when == "setup" and report.failed):
        return
    detail = dict(report.user_properties).get("detail", "")
    key = (int(match.group(1)), match.group(3) or "")
    _CRITERIA[key] = (match.group(2).replace("_", " "), report.outcome, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for (number, _), (name, outcome, detail) in sorted(_CRITERIA.items()):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {status}  {name}  {detail}".rstrip())
