import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_")
_results: dict[int, dict] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    entry = _results.setdefault(int(m.group(1)), {"passed": True, "ran": False, "details": []})
    if report.when == "call":
        entry["ran"] = True
    if report.failed:
        entry["passed"] = False
    if report.when == "call":
        entry["details"].extend(value for name, value in report.user_properties if name == "detail")


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        entry = _results[number]
        status = "PASS" if entry["passed"] and entry["ran"] else "FAIL"
        detail = "; ".join(entry["details"])
        terminalreporter.write_line(f"criterion {number}: {status}" + (f"  ({detail})" if detail else ""))
