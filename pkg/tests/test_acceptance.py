"""The ten acceptance criteria, each at its stated tolerance and time limit."""

import json

import pytest

from tamechar.acceptance import RUNNERS


@pytest.mark.parametrize("number", sorted(RUNNERS))
def test_criterion(number, capsys):
    res = RUNNERS[number](seed=0)
    with capsys.disabled():
        print("\n" + res.line())
    detail = json.dumps(res.to_json(), sort_keys=True, default=str)
    assert res.passed, detail
    assert res.in_time, detail
