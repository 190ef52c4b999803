from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from cstark.errors import ParseError
from cstark.machines import (ALWAYS, BELOW_THREE, EVENS, NEVER, CounterMachine,
                             EnumerationCursor)


def brute_members(machine: CounterMachine, s: int) -> list[int]:
    # fresh simulation per input, independent of the resumable cursor
    return [x for x in range(s) if (t := machine.halting_time(x, s)) is not None and t <= s]


def test_parse_and_print_round_trip():
    for m in (NEVER, ALWAYS, EVENS, BELOW_THREE):
        assert CounterMachine.parse(str(m)) == m


def test_parse_errors_have_positions():
    with pytest.raises(ParseError) as info:
        CounterMachine.parse("inc 0; jump 2")
    assert info.value.column == 8
    with pytest.raises(ParseError):
        CounterMachine.parse("dec 0")
    with pytest.raises(ParseError):
        CounterMachine.parse("  ")


def test_shipped_machines_semantics():
    assert NEVER.halting_time(0, 1000) is None
    assert ALWAYS.halting_time(5, 1) == 1
    for x in range(12):
        assert (EVENS.halting_time(x, 500) is not None) == (x % 2 == 0)
        assert (BELOW_THREE.halting_time(x, 500) is not None) == (x < 3)


def test_cursor_counts_are_monotone_and_match_fresh_runs():
    for m in (NEVER, ALWAYS, EVENS, BELOW_THREE):
        cur = EnumerationCursor(m)
        prev = 0
        for s in range(60):
            c = cur.count(s)
            assert c >= prev
            assert cur.members(s) == brute_members(m, s)
            prev = c
    assert EnumerationCursor(NEVER).count(1000) == 0
    assert EnumerationCursor(ALWAYS).count(50) == 50


instr = st.one_of(
    st.builds(lambda r: f"inc {r}", st.integers(0, 2)),
    st.builds(lambda r, t: f"dec {r} {t}", st.integers(0, 2), st.integers(0, 6)),
    st.builds(lambda t: f"jmp {t}", st.integers(0, 6)),
    st.just("halt"),
)


@settings(max_examples=60, deadline=None)
@given(st.lists(instr, min_size=1, max_size=6))
def test_random_machines_cursor_agrees_with_brute_force(prog):
    m = CounterMachine.parse("; ".join(prog))
    cur = EnumerationCursor(m)
    for s in (0, 3, 7, 15, 30):
        assert cur.members(s) == brute_members(m, s)
