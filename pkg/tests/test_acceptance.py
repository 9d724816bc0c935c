"""Acceptance suite: one test per criterion, each at its pinned tolerance.

Every test prints its own PASS/FAIL line (visible with `pytest -s` or on
failure); the battery is also exercised end to end through the CLI.
"""

import json

import pytest

from qcausal import checks
from qcausal.cli import main

SEED = checks.DEFAULT_SEED


@pytest.mark.parametrize(
    "number,name,fn", checks.CRITERIA, ids=[f"c{n:02d}-{name}" for n, name, _ in checks.CRITERIA]
)
def test_criterion(number, name, fn):
    passed, details, elapsed = fn(SEED)
    print(f"{'PASS' if passed else 'FAIL'} criterion {number:2d} {name} ({elapsed:.2f}s)")
    assert passed, f"criterion {number} ({name}) failed: {details}"


def test_battery_report_is_deterministic():
    _, first = checks.run_all(seed=SEED)
    _, second = checks.run_all(seed=SEED)
    assert first["allPassed"] is True
    assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)


def test_cli_check_passes_and_reruns_byte_identically(tmp_path):
    assert main(["check", "--out", str(tmp_path / "a")]) == 0
    assert main(["check", "--out", str(tmp_path / "b")]) == 0
    first = (tmp_path / "a" / "check_report.json").read_bytes()
    second = (tmp_path / "b" / "check_report.json").read_bytes()
    assert first == second
