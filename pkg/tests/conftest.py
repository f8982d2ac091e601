"""Shared fixtures: the 8-node Rabenseifner reference workload.

Cluster of 8 nodes on 2 OCSes, 400 Gbps links, 200 us reconfiguration,
40 MB allreduce.  Step volumes are 20/10/5/5/10/20 MB over configs
1,2,3,3,2,1; the stop-and-go policy lands at exactly 1500 us and the
bandwidth-only bound at 700 us, which makes hand-checking timelines easy.
"""

import pytest

from ocsched.collectives import CollectiveSpec, generate_steps
from ocsched.model import Scenario


@pytest.fixture(scope="session")
def ref_scenario():
    return Scenario(nodes=8, ocs_count=2, bandwidth=400e9, t_recfg=200e-6)


@pytest.fixture(scope="session")
def ref_steps():
    steps, _ = generate_steps(CollectiveSpec("rabenseifner", 8, 40e6))
    return steps


@pytest.fixture(scope="session")
def ref_catalog():
    _, catalog = generate_steps(CollectiveSpec("rabenseifner", 8, 40e6))
    return catalog


US = 1e-6  # seconds per microsecond, for readable expected timestamps


# --------------------------------------------------------------------------
# Acceptance-criterion reporting: each criterion is one test marked
# @pytest.mark.criterion("<name>"); the terminal summary prints one
# PASS/FAIL line per criterion regardless of output capturing.
# --------------------------------------------------------------------------

_CRITERION_RESULTS: list[tuple[str, bool]] = []


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(name): an acceptance criterion reported "
        "as a PASS/FAIL summary line"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        _CRITERION_RESULTS.append((marker.args[0], report.passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERION_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok in _CRITERION_RESULTS:
        terminalreporter.write_line(f"{name}: {'PASS' if ok else 'FAIL'}")
