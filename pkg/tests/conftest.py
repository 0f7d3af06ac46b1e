import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS: dict[str, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None or (report.when != "call" and not (report.when == "setup" and report.outcome != "passed")):
        return
    number, title = marker
    entry = _RESULTS.setdefault(number, {"title": title, "outcomes": [], "notes": []})
    entry["outcomes"].append(report.outcome)
    entry["notes"] += [str(v) for k, v in report.user_properties if k == "measured"]


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        report.criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        entry = _RESULTS[number]
        outcomes = entry["outcomes"]
        if "failed" in outcomes:
            status = "FAIL"
        elif outcomes and all(o == "skipped" for o in outcomes):
            status = "WAIVED"
        else:
            status = "PASS"
        notes = "; ".join(entry["notes"])
        terminalreporter.write_line(f"[{status}] criterion {number}: {entry['title']}" + (f" ({notes})" if notes else ""))
