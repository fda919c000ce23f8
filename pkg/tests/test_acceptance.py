"""Every numbered acceptance criterion at its stated tolerance.

Each test prints one ``[PASS]``/``[FAIL]`` line (visible with ``-s`` or in
the captured output of a failure) and asserts the check passed.
"""
import pytest

from flatband.validation import CHECKS


SLOW = {9}  # four full-size lattice diagonalizations


@pytest.mark.parametrize("criterion", [
    pytest.param(c, id=f"criterion_{c:02d}", marks=[pytest.mark.slow] if c in SLOW else [])
    for c in sorted(CHECKS)
])
def test_acceptance(criterion):
    result = CHECKS[criterion]()
    print(result.line())
    assert result.passed, result.line()
