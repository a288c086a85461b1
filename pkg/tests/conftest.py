"""Shared pytest wiring for the suite.

The acceptance tests double as a release gate, so their outcomes are
echoed as one line per criterion in the terminal summary regardless of
verbosity.
"""

from __future__ import annotations


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = []
    for outcome in ("passed", "failed", "error", "skipped"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py::" not in nodeid:
                continue
            if getattr(report, "when", "call") not in ("call", "setup"):
                continue
            name = nodeid.split("::", 1)[1]
            lines.append((name, outcome.upper()))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(lines):
        verdict = {"PASSED": "PASS", "FAILED": "FAIL", "ERROR": "FAIL"}.get(outcome, outcome)
        terminalreporter.write_line(f"{name:<58s} {verdict}")
