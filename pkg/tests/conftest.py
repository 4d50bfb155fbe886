import re

from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def _results():
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return None
    return RESULTS


def pytest_runtest_logreport(report):
    # a criterion that crashes before reporting still gets a FAIL line
    m = re.search(r"test_criterion_(\d+)", report.nodeid)
    results = _results()
    if m and report.when == "call" and report.failed and results is not None:
        n = int(m.group(1))
        if n not in results:
            results[n] = f"FAIL criterion {n}: error {report.longrepr.reprcrash.message if hasattr(report.longrepr, 'reprcrash') else ''}"


def pytest_terminal_summary(terminalreporter):
    results = _results()
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
