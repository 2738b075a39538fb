import numpy as np
import pytest

_criteria = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    if report.when == "setup" and report.passed:
        return
    entry = _criteria.setdefault(marker.args[0], {"ok": True, "details": []})
    entry["ok"] = entry["ok"] and report.passed
    detail = dict(item.user_properties).get("detail", "")
    status = "ok" if report.passed else "FAILED"
    entry["details"].append(f"{item.name.split('_', 3)[-1]} {status}" + (f" ({detail})" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria):
        entry = _criteria[key]
        line = f"criterion {key:>2}: {'PASS' if entry['ok'] else 'FAIL'}  " + "; ".join(entry["details"])
        terminalreporter.write_line(line)
