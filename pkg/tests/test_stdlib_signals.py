"""Behavior of the bundled signal combinators, run through the interpreter.

Expected values come from independent oracles: plain Python folds over event
lists, hand-applied emission rules, and the debounce window rule.
"""

from __future__ import annotations

import random
from functools import reduce

import pytest

import values as V
from junc.hal import VirtualDevice
from junc.interp import BoolVal, Interp, RefCellVal, TupleVal, UNIT_VAL


@pytest.fixture()
def interp(stdlib_program):
    it = Interp(stdlib_program, VirtualDevice(tick=100))
    it.init_modules()
    return it


def call(interp, module, name, *args):
    return interp.call_function(module, name, list(args))


BOTH_SHAPES = [V.sig_just(V.i32(5)), V.sig_nothing()]


# -- map: functor laws --------------------------------------------------------------


def test_map_identity_both_shapes(interp):
    ident = V.int_fn(lambda v: v)
    for s in BOTH_SHAPES:
        assert call(interp, "Signal", "map", ident, s) == s


def test_map_composition_200_random_cases(interp):
    rng = random.Random(42)
    for _ in range(200):
        table_f = {i: rng.randrange(-50, 50) for i in range(-60, 60)}
        table_g = {i: rng.randrange(-30, 30) for i in range(-60, 60)}
        f = V.int_fn(lambda v, t=table_f: t.get(v, 0))
        g = V.int_fn(lambda v, t=table_g: t.get(v, 0))
        fg = V.int_fn(lambda v, tf=table_f, tg=table_g: tf.get(tg.get(v, 0), 0))
        s = (
            V.sig_just(V.i32(rng.randrange(-40, 40)))
            if rng.random() < 0.7
            else V.sig_nothing()
        )
        composed = call(interp, "Signal", "map", fg, s)
        nested = call(
            interp, "Signal", "map", f, call(interp, "Signal", "map", g, s)
        )
        assert composed == nested


# -- foldP --------------------------------------------------------------------------


def test_foldp_spec_examples(interp):
    add = V.host_fn(lambda v, acc: V.i32(v.v + acc.v))
    cell = RefCellVal(V.i32(10))
    out = call(interp, "Signal", "foldP", add, cell, V.sig_just(V.i32(5)))
    assert out == V.sig_just(V.i32(15)) and cell.contents == V.i32(15)

    cell = RefCellVal(V.i32(10))
    out = call(interp, "Signal", "foldP", add, cell, V.sig_nothing())
    assert out == V.sig_nothing() and cell.contents == V.i32(10)

    keep = V.host_fn(lambda v, acc: acc)
    cell = RefCellVal(V.i32(7))
    for s in [V.sig_just(V.i32(1)), V.sig_just(V.i32(2)), V.sig_nothing()]:
        call(interp, "Signal", "foldP", keep, cell, s)
    assert cell.contents == V.i32(7)


def test_foldp_agrees_with_list_fold_1000_sequences(interp):
    """State coherence: after events e1..en the ref equals a plain fold."""
    rng = random.Random(20160924)
    add_mul = V.host_fn(lambda v, acc: V.i32((acc.v * 2 + v.v) % 100003))
    for _ in range(1000):
        events = [
            rng.randrange(-100, 100) if rng.random() < 0.6 else None
            for _ in range(rng.randrange(0, 12))
        ]
        cell = RefCellVal(V.i32(1))
        emitted = []
        for ev in events:
            incoming = V.sig_just(V.i32(ev)) if ev is not None else V.sig_nothing()
            out = call(interp, "Signal", "foldP", add_mul, cell, incoming)
            emitted.append(out)
        just_events = [e for e in events if e is not None]
        expected_state = reduce(
            lambda acc, v: (acc * 2 + v) % 100003, just_events, 1
        )
        assert cell.contents == V.i32(expected_state)
        # Emission rule: state snapshots on just-events, nothing otherwise.
        snapshots = []
        acc = 1
        for ev in events:
            if ev is None:
                snapshots.append(V.sig_nothing())
            else:
                acc = (acc * 2 + ev) % 100003
                snapshots.append(V.sig_just(V.i32(acc)))
        assert emitted == snapshots


# -- latch --------------------------------------------------------------------------


def test_latch_spec_examples(interp):
    cell = RefCellVal(V.i32(0))
    out = call(interp, "Signal", "latch", V.sig_just(V.i32(7)), cell)
    assert out == V.sig_just(V.i32(7)) and cell.contents == V.i32(7)

    out = call(interp, "Signal", "latch", V.sig_nothing(), cell)
    assert out == V.sig_just(V.i32(7))
    again = call(interp, "Signal", "latch", V.sig_nothing(), cell)
    assert again == out  # consecutive silent inputs replay the same value


def test_latch_hold_property(interp):
    rng = random.Random(7)
    cell = RefCellVal(V.i32(0))
    last_seen = 0
    for _ in range(300):
        if rng.random() < 0.4:
            v = rng.randrange(-99, 99)
            out = call(interp, "Signal", "latch", V.sig_just(V.i32(v)), cell)
            assert out == V.sig_just(V.i32(v))
            last_seen = v
        else:
            out = call(interp, "Signal", "latch", V.sig_nothing(), cell)
            assert out == V.sig_just(V.i32(last_seen))


# -- constant / meta / unmeta ---------------------------------------------------------


def test_constant(interp):
    assert call(interp, "Signal", "constant", V.i32(3)) == V.sig_just(V.i32(3))
    assert call(interp, "Signal", "constant", UNIT_VAL) == V.sig_just(UNIT_VAL)


def test_meta_wraps_presence(interp):
    assert call(interp, "Signal", "meta", V.sig_nothing()) == V.sig_just(
        V.nothing()
    )
    assert call(interp, "Signal", "meta", V.sig_just(V.i32(4))) == V.sig_just(
        V.just(V.i32(4))
    )


def test_unmeta_inverts_meta_both_shapes(interp):
    for s in BOTH_SHAPES:
        assert call(interp, "Signal", "unmeta", call(interp, "Signal", "meta", s)) == s


# -- map2 -----------------------------------------------------------------------------


def map2_call(interp, f, s1, s2, state):
    return call(interp, "Signal", "map2", f, s1, s2, state)


def test_map2_latches_silent_side(interp):
    add = V.host_fn(lambda a, b: V.i32(a.v + b.v))
    state = RefCellVal(TupleVal((V.i32(10), V.i32(20))))
    out = map2_call(interp, add, V.sig_just(V.i32(1)), V.sig_nothing(), state)
    assert out == V.sig_just(V.i32(21))  # f(new left, latched right)
    assert state.contents == TupleVal((V.i32(1), V.i32(20)))


def test_map2_both_nothing_emits_nothing(interp):
    add = V.host_fn(lambda a, b: V.i32(a.v + b.v))
    state = RefCellVal(TupleVal((V.i32(10), V.i32(20))))
    out = map2_call(interp, add, V.sig_nothing(), V.sig_nothing(), state)
    assert out == V.sig_nothing()
    assert state.contents == TupleVal((V.i32(10), V.i32(20)))


def test_map2_both_just(interp):
    add = V.host_fn(lambda a, b: V.i32(a.v + b.v))
    state = RefCellVal(TupleVal((V.i32(10), V.i32(20))))
    out = map2_call(interp, add, V.sig_just(V.i32(2)), V.sig_just(V.i32(3)), state)
    assert out == V.sig_just(V.i32(5))
    assert state.contents == TupleVal((V.i32(2), V.i32(3)))


# -- dropRepeats / toggle / sink / filter ---------------------------------------------


def test_drop_repeats(interp):
    cell = RefCellVal(V.i32(4))
    assert call(
        interp, "Signal", "dropRepeats", V.sig_just(V.i32(4)), cell
    ) == V.sig_nothing()
    out = call(interp, "Signal", "dropRepeats", V.sig_just(V.i32(9)), cell)
    assert out == V.sig_just(V.i32(9)) and cell.contents == V.i32(9)
    assert call(
        interp, "Signal", "dropRepeats", V.sig_nothing(), cell
    ) == V.sig_nothing()


def test_toggle(interp):
    on, off = V.i32(1), V.i32(0)
    cell = RefCellVal(on)
    fire = V.sig_just(UNIT_VAL)
    out = call(interp, "Signal", "toggle", on, off, cell, fire)
    assert out == V.sig_just(off) and cell.contents == off
    out = call(interp, "Signal", "toggle", on, off, cell, fire)
    assert out == V.sig_just(on) and cell.contents == on
    out = call(interp, "Signal", "toggle", on, off, cell, V.sig_nothing())
    assert out == V.sig_nothing() and cell.contents == on


def test_sink_runs_effect_only_on_just(interp):
    calls = []
    recorder = V.host_fn(lambda v: (calls.append(v.v), UNIT_VAL)[1])
    out = call(interp, "Signal", "sink", recorder, V.sig_just(V.i32(5)))
    assert out is UNIT_VAL and calls == [5]
    call(interp, "Signal", "sink", recorder, V.sig_nothing())
    assert calls == [5]
    call(interp, "Signal", "sink", recorder, V.sig_just(V.i32(6)))
    call(interp, "Signal", "sink", recorder, V.sig_just(V.i32(7)))
    assert calls == [5, 6, 7]  # program order


def test_filter(interp):
    is_even = V.host_fn(lambda v: BoolVal(v.v % 2 == 0))
    assert call(interp, "Signal", "filter", is_even, V.sig_just(V.i32(4))) == V.sig_just(V.i32(4))
    assert call(interp, "Signal", "filter", is_even, V.sig_just(V.i32(3))) == V.sig_nothing()
    assert call(interp, "Signal", "filter", is_even, V.sig_nothing()) == V.sig_nothing()


# -- Io -------------------------------------------------------------------------------


def test_io_toggle(interp):
    assert call(interp, "Io", "toggle", V.low()) == V.high()
    assert call(interp, "Io", "toggle", V.high()) == V.low()


def test_falling_edge(interp):
    cell = RefCellVal(V.high())
    out = call(interp, "Io", "fallingEdge", V.sig_just(V.low()), cell)
    assert out == V.sig_just(UNIT_VAL) and cell.contents == V.low()
    out = call(interp, "Io", "fallingEdge", V.sig_just(V.low()), cell)
    assert out == V.sig_nothing()
    assert call(interp, "Io", "fallingEdge", V.sig_nothing(), cell) == V.sig_nothing()


def test_rising_edge(interp):
    cell = RefCellVal(V.low())
    out = call(interp, "Io", "risingEdge", V.sig_just(V.high()), cell)
    assert out == V.sig_just(UNIT_VAL) and cell.contents == V.high()
    assert call(
        interp, "Io", "risingEdge", V.sig_just(V.high()), cell
    ) == V.sig_nothing()


def test_dig_in_always_emits(stdlib_program):
    device = VirtualDevice(schedule=[(1500, 7, 1)], tick=100)
    it = Interp(stdlib_program, device)
    it.init_modules()
    out = it.call_function("Io", "digIn", [V.i32(7)])
    assert out == V.sig_just(V.low())  # unscheduled time: still an event
    device.clock = 1500
    out = it.call_function("Io", "digIn", [V.i32(7)])
    assert out == V.sig_just(V.high())


def test_dig_out_writes_once_per_just(stdlib_program):
    device = VirtualDevice(tick=100)
    it = Interp(stdlib_program, device)
    it.init_modules()
    inputs = [V.sig_just(V.high()), V.sig_nothing(), V.sig_just(V.low()),
              V.sig_nothing(), V.sig_nothing(), V.sig_just(V.high())]
    for s in inputs:
        it.call_function("Io", "digOut", [V.i32(13), s])
    just_count = sum(1 for s in inputs if s.payload.tag == 0)
    assert len(device.trace) == just_count
    assert [level for _, _, level in device.trace] == [1, 0, 1]


# -- Time -----------------------------------------------------------------------------


def test_time_state_returns_fresh_cells(stdlib_program):
    device = VirtualDevice(tick=10)
    it = Interp(stdlib_program, device)
    it.init_modules()
    s1 = it.call_function("Time", "state", [])
    s2 = it.call_function("Time", "state", [])
    assert s1 is not s2
    assert s1.contents == V.timer_state(0)
    s1.contents = V.timer_state(99)
    assert s2.contents == V.timer_state(0)  # cells are independent


def test_time_every_rule(stdlib_program):
    device = VirtualDevice(tick=1000)
    it = Interp(stdlib_program, device)
    it.init_modules()
    state = RefCellVal(V.timer_state(0))
    # First call: now() -> 1000, 1000 - 0 >= 1000: emit.
    out = it.call_function("Time", "every", [V.u32(1000), state])
    assert out == V.sig_just(V.u32(1000))
    assert state.contents == V.timer_state(1000)


def test_time_every_below_interval_is_silent(stdlib_program):
    device = VirtualDevice(tick=999)
    it = Interp(stdlib_program, device)
    it.init_modules()
    state = RefCellVal(V.timer_state(0))
    out = it.call_function("Time", "every", [V.u32(1000), state])
    assert out == V.sig_nothing()
    assert state.contents == V.timer_state(0)


def test_time_every_zero_interval_fires_every_call(stdlib_program):
    device = VirtualDevice(tick=10)
    it = Interp(stdlib_program, device)
    it.init_modules()
    state = RefCellVal(V.timer_state(0))
    for k in range(1, 6):
        out = it.call_function("Time", "every", [V.u32(0), state])
        assert out == V.sig_just(V.u32(10 * k))


def test_time_every_spacing_property(stdlib_program):
    rng = random.Random(3)
    device = VirtualDevice(tick=37)
    it = Interp(stdlib_program, device)
    it.init_modules()
    state = RefCellVal(V.timer_state(0))
    interval = 100
    stamps = []
    for _ in range(200):
        out = it.call_function("Time", "every", [V.u32(interval), state])
        if out.payload.tag == 0:
            stamps.append(out.payload.payload.v)
    assert stamps == sorted(stamps)
    assert all(b - a >= interval for a, b in zip(stamps, stamps[1:]))


# -- Button ---------------------------------------------------------------------------


def _debounce_call(it, state, level_sig):
    return it.call_function("Button", "debounce", [level_sig, state])


def test_debounce_emits_after_window(stdlib_program):
    # Stable high before t=0; the input flips to low and stays low. With a
    # 10ms tick the first call at now >= 50 emits the change.
    device = VirtualDevice(tick=10)
    it = Interp(stdlib_program, device)
    it.init_modules()
    state = RefCellVal(V.button_state(V.high(), 0))
    outs = []
    for _ in range(7):
        outs.append(_debounce_call(it, state, V.sig_just(V.low())))
    # Calls happen at t=10..40 (nothing) and t=50 (emit).
    assert outs[:4] == [V.sig_nothing()] * 4
    assert outs[4] == V.sig_just(V.low())
    assert device.clock >= 50


def test_debounce_bounce_suppressed(stdlib_program):
    device = VirtualDevice(tick=10)
    it = Interp(stdlib_program, device)
    it.init_modules()
    state = RefCellVal(V.button_state(V.high(), 0))
    out1 = _debounce_call(it, state, V.sig_just(V.low()))   # t=10: differs
    out2 = _debounce_call(it, state, V.sig_just(V.high()))  # t=20: back to stable
    assert out1 == V.sig_nothing() and out2 == V.sig_nothing()
    # The timer reset at t=20; low must persist 50ms from there.
    outs = [_debounce_call(it, state, V.sig_just(V.low())) for _ in range(5)]
    assert outs[:4] == [V.sig_nothing()] * 4
    assert outs[4] == V.sig_just(V.low())  # t=70 = 20 + 50


def test_debounce_constant_level_never_emits(stdlib_program):
    device = VirtualDevice(tick=10)
    it = Interp(stdlib_program, device)
    it.init_modules()
    state = RefCellVal(V.button_state(V.low(), 0))
    for _ in range(20):
        assert _debounce_call(it, state, V.sig_just(V.low())) == V.sig_nothing()


def test_debounce_timed_window_is_parameter(stdlib_program):
    device = VirtualDevice(tick=10)
    it = Interp(stdlib_program, device)
    it.init_modules()
    state = RefCellVal(V.button_state(V.high(), 0))
    out = it.call_function(
        "Button", "debounceTimed", [V.sig_just(V.low()), state, V.u32(10)]
    )
    assert out == V.sig_just(V.low())  # 10ms window already satisfied at t=10
