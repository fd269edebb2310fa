import pathlib
import re

import pytest

from ptmpix.config import ref_a
from ptmpix.curve import extract_curve

REPO_ROOT = pathlib.Path(__file__).resolve().parents[1]
REF_A_JSON = REPO_ROOT / "configs" / "ref-A.json"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    results = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance" not in nodeid:
                continue
            m = re.search(r"test_c(\d+)_(\w+)", nodeid)
            if not m:
                continue
            key = int(m.group(1))
            label = m.group(2).replace("_", "-")
            status = "PASS" if outcome == "passed" else "FAIL"
            # setup/teardown reports must not overwrite a call failure
            if key not in results or status == "FAIL":
                results[key] = (label, status)
    if results:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for key in sorted(results):
            label, status = results[key]
            terminalreporter.write_line(f"  ACCEPTANCE {key:02d} {label}: {status}")


@pytest.fixture(scope="session")
def ref_a_config():
    return ref_a()


@pytest.fixture(scope="session")
def ref_a_pixel(ref_a_config):
    return ref_a_config.pixel


@pytest.fixture(scope="session")
def ref_a_curve(ref_a_pixel):
    # The 256-point extraction is reused across many tests; extract once.
    return extract_curve(ref_a_pixel)
