"""Acceptance criteria 1-9. Every comparison is exact rational equality (tolerance 0).

Run directly (`python tests/test_acceptance.py`) for the pass/fail table alone.
"""

from pathlib import Path

import pytest

from valtree.acceptance import CHECKS, AcceptanceConfig, run_check

GOLDEN = Path(__file__).parent / "golden"
CFG = AcceptanceConfig(golden_dir=str(GOLDEN))
TOLERANCE = {i: "exact" for i, _, _ in CHECKS}
RESULTS = []


@pytest.mark.parametrize("index", [i for i, _, _ in CHECKS])
def test_criterion(index):
    r = run_check(index, CFG)
    RESULTS.append(r)
    print(f"{r.line()} (tolerance: {TOLERANCE[index]})")
    assert r.ok, r.detail


if __name__ == "__main__":
    for i, _, _ in CHECKS:
        print(f"{run_check(i, CFG).line()} (tolerance: {TOLERANCE[i]})")
