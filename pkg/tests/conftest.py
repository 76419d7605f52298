import os
import re

import pytest

_CRITERION = re.compile(r"test_criterion_(\d+)_")
_outcomes: dict[int, tuple[str, str]] = {}


def pytest_collection_modifyitems(config, items):
    if os.environ.get("HEXCELL_SCALE") == "1":
        return
    skip = pytest.mark.skip(reason="set HEXCELL_SCALE=1 to run")
    for item in items:
        if "scale" in item.keywords:
            item.add_marker(skip)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    match = _CRITERION.match(item.name)
    if not match:
        return
    k = int(match.group(1))
    doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        if k not in _outcomes or status == "FAIL":
            _outcomes[k] = (status, doc)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_outcomes):
        status, doc = _outcomes[k]
        terminalreporter.write_line(f"criterion {k}: {status}  {doc}")
