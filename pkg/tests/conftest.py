"""Shared test helpers and the acceptance-criteria summary block.

Acceptance tests register a one-line verdict through the `criterion`
fixture; pytest prints the collected lines after the normal summary so a
full run ends with one PASS/FAIL line per criterion.
"""

import pytest

_RESULTS: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record a criterion verdict, then assert it.

    Usage: criterion("3", ok, "max deviation 2.1e-09"). The record survives
    the assert so failed criteria still show up in the summary block.
    """

    def check(label: str, passed: bool, detail: str = ""):
        _RESULTS[label] = (bool(passed), detail)
        assert passed, f"criterion {label}: {detail}"

    return check


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_RESULTS):
        passed, detail = _RESULTS[label]
        verdict = "PASS" if passed else "FAIL"
        line = f"criterion {label}: {verdict}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
