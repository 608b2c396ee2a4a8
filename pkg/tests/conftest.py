from __future__ import annotations

import os
from collections import defaultdict

import pytest

CRITERIA = {
    1: "interval classification counts, n = 4..15",
    2: "face vectors of the nine tabulated cases",
    3: "symbolic vertex tables, n = 4..7",
    4: "vertex/facet/singular counts on (1/(n-1), 1/(n-2)), n = 4..9",
    5: "min/max cyclic vertex classes per type (ii) interval, n <= 12",
    6: "n = 9 vertex with two consecutive zeros",
    7: "spectral identities on random interior points",
    8: "fiber types and orbit invariance",
    9: "Lax matrix, cross-section, trace and fiber flows",
    10: "edge directions at n = 4",
}

_outcomes: dict[int, list[str]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion the test belongs to")


def pytest_collection_modifyitems(config, items):
    if os.environ.get("ALCOVE_STRETCH"):
        return
    skip = pytest.mark.skip(reason="stretch case; set ALCOVE_STRETCH=1")
    for item in items:
        if "stretch" in item.keywords:
            item.add_marker(skip)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _outcomes[marker.args[0]].append(rep.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, label in CRITERIA.items():
        got = _outcomes.get(n)
        if not got:
            status = "NOT RUN"
        elif any(o == "failed" for o in got):
            status = "FAIL"
        elif all(o == "skipped" for o in got):
            status = "SKIPPED"
        else:
            status = "PASS"
        terminalreporter.write_line(f"criterion {n:2d} [{status}] {label}")
