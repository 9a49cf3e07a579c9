"""Acceptance criteria, one test each, at their stated tolerances.

Every criterion's pass/fail line is printed and also collected for the
terminal summary (see conftest.py).
"""

import pytest

from tlfrls.acceptance import CRITERIA, AcceptanceContext, evaluate

RESULTS = []


@pytest.fixture(scope="module")
def ctx():
    return AcceptanceContext()


@pytest.mark.parametrize("cid", [cid for cid, _, _ in CRITERIA], ids=[f"criterion_{cid:02d}" for cid, _, _ in CRITERIA])
def test_criterion(ctx, cid):
    result = evaluate(ctx, cid)
    RESULTS.append(result)
    print(result.line())
    assert result.passed, result.line()
