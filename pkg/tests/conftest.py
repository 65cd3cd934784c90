import os
import re

import pytest

ACCEPTANCE_RESULTS: dict[int, tuple[str, str]] = {}


def pytest_collection_modifyitems(config, items):
    if os.environ.get("GL2CHEREDNIK_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="slow; set GL2CHEREDNIK_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        verdict, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {verdict}  {detail}")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    m = re.match(r"test_criterion_(\d+)_", item.name)
    if m and report.when == "call" and report.failed:
        n = int(m.group(1))
        ACCEPTANCE_RESULTS.setdefault(n, ("FAIL", f"error: {call.excinfo.typename}"))
