import re
from collections import defaultdict

_CRITERION = re.compile(r"test_acceptance\.py::test_c(\d+)_")
_results: dict[int, list[bool]] = defaultdict(list)

CRITERIA = {
    1: "beamsplitter statistics",
    2: "blocker and mirror interventions",
    3: "Mach-Zehnder tuning, phase invariance and fringes",
    4: "consistency verdicts",
    5: "spin-half cause identification",
    6: "calibration property",
    7: "EPRB correlations and common cause",
    8: "Charlie pseudo-cause",
    9: "property suites",
    10: "parser round-trip, fuzz and rejection",
}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if m is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _results[int(m.group(1))].append(report.outcome == "passed")


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in CRITERIA.items():
        runs = _results.get(n)
        if not runs:
            status = "NOT RUN"
        else:
            status = "PASS" if all(runs) else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d} {status:7s} {title}")
