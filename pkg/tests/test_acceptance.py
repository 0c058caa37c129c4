"""One test per acceptance criterion; each prints a PASS/FAIL line with its measured figures.

The lines bypass output capture, so they appear in any pytest run.
"""

import pytest

from conewright import acceptance


@pytest.mark.parametrize("number", sorted(acceptance.CRITERIA))
def test_criterion(number, capsys):
    res = acceptance.run(number, seed=0)
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.line()


def test_every_criterion_is_covered():
    assert sorted(acceptance.CRITERIA) == list(range(1, 11))


def test_octahedron_runtime_budget():
    res = acceptance.run(1)
    assert res.seconds < 10


def test_schlafli_runtime_budget():
    res = acceptance.run(6)
    assert res.seconds < 120
