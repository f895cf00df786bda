"""Every acceptance criterion at its stated tolerance, one PASS/FAIL line each."""
import pytest

from packing_lab.acceptance import CRITERIA, run_criterion

from conftest import ACCEPTANCE_LINES

SLOW = {9, 11}


@pytest.mark.parametrize(
    "k", [pytest.param(k, marks=pytest.mark.slow) if k in SLOW else k for k in sorted(CRITERIA)]
)
def test_criterion(k):
    r = run_criterion(k)
    line = f"criterion {k:2d} {'PASS' if r.passed else 'FAIL'} ({r.seconds:.1f}s) {r.title}: {r.detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert r.passed, line
