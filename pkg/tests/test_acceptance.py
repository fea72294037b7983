"""Every acceptance criterion at its stated tolerance and time limit."""

import pytest

from ccstab.acceptance import CRITERIA


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, acceptance_log):
    result = CRITERIA[number]()
    line = result.line()
    print(line)
    acceptance_log.append(line)
    assert result.ok, line
