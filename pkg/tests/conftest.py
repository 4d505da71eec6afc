import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

# acceptance verdicts, filled by test_acceptance.record
VERDICTS = {}


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(VERDICTS):
        ok, detail = VERDICTS[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
