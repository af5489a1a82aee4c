"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -s`` to see the lines, or
``conclusive verify`` for the same report outside pytest.
"""

from __future__ import annotations

import time

import pytest

from conclusive import verify

CRITERIA = {
    1: verify.check_success_probability,
    2: verify.check_qact1_branches,
    3: verify.check_conclusive_subprobability,
    4: verify.check_conclusive_fidelity,
    5: verify.check_standard_baseline,
    6: verify.check_bits,
    7: verify.check_povm_validity,
    8: verify.check_no_signaling,
    9: verify.check_monte_carlo,
    10: verify.check_secrecy,
}

_elapsed: list[float] = []


@pytest.mark.parametrize("number", sorted(CRITERIA), ids=lambda n: f"criterion_{n:02d}")
def test_criterion(number):
    start = time.perf_counter()
    result = CRITERIA[number]()
    _elapsed.append(time.perf_counter() - start)
    print(result.line())
    assert result.number == number
    assert result.passed, result.line()


def test_criterion_11_runtime():
    # the other criteria ran just above; rerun them if this test is selected alone
    if len(_elapsed) != len(CRITERIA):
        _elapsed.clear()
        for check in CRITERIA.values():
            start = time.perf_counter()
            check()
            _elapsed.append(time.perf_counter() - start)
    total = sum(_elapsed)
    ok = total < verify.TIME_LIMIT
    print(f"[{'PASS' if ok else 'FAIL'}] 11. verify suite runtime: measured {total:.1f} s; expected < {verify.TIME_LIMIT:.0f} s")
    assert ok
