"""Acceptance suite: every criterion at its stated tolerance and time limit.

Run with `pytest -s tests/test_acceptance.py` to see the per-criterion
table, or `afflab verify-paper` for the same checks from the CLI.
"""

import pytest

from afflab.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("cid,title", [(cid, title) for cid, title, _ in CRITERIA])
def test_criterion(cid, title, capsys):
    result = run_criterion(cid)
    with capsys.disabled():
        print(("\n" if cid == 1 else "") + result.line())
    assert result.passed, (cid, title, result.detail)
    assert result.within_time, (cid, "took %.1fs, limit %ds"
                                % (result.elapsed, result.time_limit))
