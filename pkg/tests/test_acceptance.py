"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import pytest

from darkstate_lab.acceptance import CRITERIA

RESULTS = []


@pytest.mark.parametrize("criterion", CRITERIA, ids=[c.__name__ for c in CRITERIA])
def test_criterion(criterion):
    result = criterion()
    RESULTS.append(result)
    print(result.line())
    assert result.passed, result.line()
