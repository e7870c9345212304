"""The acceptance gate: one test per headline criterion.

Each test prints its criterion's PASS/FAIL line so the full scorecard is
visible in the pytest output.  The quarter-turn endpoint check is expected
to fail: the stated endpoint value belongs to the spin-axis-aligned
configuration, not to the m-axis curve that produces the 1/sqrt(5)
threshold, so the faithful implementation cannot reach it.  It is kept as
a strict xfail rather than weakened.
"""

import pytest

from pentaspin import repro

QUARTER_PI_DEFECT = pytest.mark.xfail(
    strict=True,
    reason=(
        "stated quarter-turn endpoint is the spin-axis-aligned value "
        "(5 - sqrt(5))/2; the m-axis closed form gives (5 + sqrt(5))/4"
    ),
)


def _case(fn):
    name = fn.__name__.removeprefix("check_")
    marks = [QUARTER_PI_DEFECT] if fn is repro.check_7c_quarter_pi else []
    return pytest.param(fn, id=name, marks=marks)


@pytest.mark.parametrize("criterion", [_case(fn) for fn in repro.CRITERIA])
def test_acceptance(criterion):
    result = criterion()
    status = "PASS" if result.passed else "FAIL"
    print(f"{status} {result.criterion}: {result.detail}")
    assert result.passed, result.detail
