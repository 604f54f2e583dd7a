"""Full acceptance sweep: every criterion must hold at its stated tolerance.

Each case prints one PASS/FAIL line plus the measured numbers, so the pytest
output doubles as the acceptance report.
"""

import pytest

from blochdyn.acceptance import CRITERIA

SEED = 12345


@pytest.mark.parametrize("cid,name,check", CRITERIA,
                         ids=[f"{cid:02d}-{name}" for cid, name, _ in CRITERIA])
def test_criterion(cid, name, check):
    result = check(SEED)
    print(f"[{'PASS' if result.passed else 'FAIL'}] criterion {cid}: {name}")
    print(f"       {result.detail}")
    assert result.cid == cid
    assert result.passed, f"criterion {cid} ({name}): {result.detail}"
