import sys
import time
from pathlib import Path

from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("repro", derandomize=True, deadline=None, max_examples=60, print_blob=True)
settings.load_profile("repro")

_SESSION = {"start": None, "acceptance": {}, "failed": 0}
SUITE_BUDGET_S = 60.0


def pytest_sessionstart(session):
    _SESSION["start"] = time.perf_counter()


def pytest_runtest_logreport(report):
    if report.failed:
        _SESSION["failed"] += 1
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if not name.startswith("test_ac"):
        return
    prev = _SESSION["acceptance"].get(name, ("passed", 0.0))
    outcome = prev[0] if prev[0] == "failed" else report.outcome
    _SESSION["acceptance"][name] = (outcome, prev[1] + report.duration)


def pytest_terminal_summary(terminalreporter):
    results = _SESSION["acceptance"]
    if not results:
        return
    elapsed = time.perf_counter() - _SESSION["start"]
    tr = terminalreporter
    tr.section("acceptance criteria")
    for name in sorted(results):
        outcome, dur = results[name]
        number = int(name[len("test_ac"):].split("_")[0])
        label = name.split("_", 2)[2].replace("_", " ")
        if number == 11:
            ok = outcome == "passed" and elapsed < SUITE_BUDGET_S and _SESSION["failed"] == 0
            extra = f"suite wall-clock {elapsed:.1f} s (budget {SUITE_BUDGET_S:.0f} s), failed tests {_SESSION['failed']}"
        else:
            ok = outcome == "passed"
            extra = f"{dur:.2f} s"
        tr.write_line(f"AC{number:<2d} {'PASS' if ok else 'FAIL'}  {label}  [{extra}]")
