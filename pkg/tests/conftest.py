import sys
from pathlib import Path

from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")

# criterion id -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in ACCEPTANCE_RESULTS.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
