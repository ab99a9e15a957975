"""
Tests du noyau de simulation : ordonnancement, horloge, journal et flux pseudo-aléatoires.
"""

import json

import pytest

from simkern import (
    ClockRegressionError,
    EventKind,
    EventLog,
    RandomStreams,
    SchedulingInPastError,
    SimClock,
    SimKernel,
)


def test_events_run_in_time_then_insertion_order(kernel: SimKernel):
    order: list[str] = []

    kernel.schedule(lambda: order.append("b"), at=20)
    kernel.schedule(lambda: order.append("a1"), at=10)
    kernel.schedule(lambda: order.append("a2"), at=10)
    kernel.schedule(lambda: order.append("c"), at=30)

    assert kernel.run(until=25) == 3
    assert order == ["a1", "a2", "b"]
    assert kernel.now == 25

    kernel.run(until=100)
    assert order == ["a1", "a2", "b", "c"]
    assert kernel.now == 100


def test_scheduling_in_the_past_is_rejected(kernel: SimKernel):
    kernel.run(until=50)

    with pytest.raises(SchedulingInPastError) as error:
        kernel.schedule(lambda: None, at=40)

    assert error.value.at == 40
    assert error.value.now == 50
    assert "t=40" in str(error.value)


def test_clock_cannot_regress():
    clock = SimClock()
    clock.advance_to(10)

    with pytest.raises(ClockRegressionError):
        clock.advance_to(5)


def test_cancelled_event_is_skipped(kernel: SimKernel):
    fired: list[int] = []
    handle = kernel.schedule(lambda: fired.append(1), at=10)

    SimKernel.cancel(handle)
    kernel.run(until=20)

    assert fired == []
    assert not handle.pending


def test_periodic_event_fires_every_period_until_cancelled(kernel: SimKernel):
    times: list[int] = []
    periodic = kernel.every(100, lambda: times.append(kernel.now), start=0)

    kernel.run(until=350)
    assert times == [0, 100, 200, 300]

    SimKernel.cancel(periodic)
    kernel.run(until=1000)
    assert times == [0, 100, 200, 300]


def test_periodic_event_requires_positive_period(kernel: SimKernel):
    with pytest.raises(ValueError):
        kernel.every(0, lambda: None)


def test_stop_halts_the_loop_without_advancing_to_until(kernel: SimKernel):
    kernel.schedule(kernel.stop, at=30)
    kernel.schedule(lambda: None, at=40)

    kernel.run(until=100)

    assert kernel.stopped
    assert kernel.now == 30


def test_event_log_records_are_ordered_and_serialized_stably(kernel: SimKernel, event_log: EventLog):
    kernel.schedule(lambda: event_log.append("DRV", EventKind.ERROR_RAISED, code=21, source="timeout"), at=5)
    kernel.schedule(lambda: event_log.append("BTS", EventKind.REBOOT), at=5)
    kernel.run(until=10)

    lines = event_log.to_jsonl().splitlines()

    assert lines[0] == '{"detail":{"code":21,"source":"timeout"},"kind":"error-raised","node":"DRV","t":5}'
    assert json.loads(lines[1]) == {"detail": {}, "kind": "reboot", "node": "BTS", "t": 5}
    assert [record.seq for record in event_log.records] == [0, 1]


def test_event_log_select_first_and_count(kernel: SimKernel, event_log: EventLog):
    event_log.append("DRV", EventKind.ERROR_RAISED, code=21)
    event_log.append("DRV", EventKind.ERROR_RAISED, code=24)
    event_log.append("BCTRL", EventKind.SLEEP)

    assert event_log.count(EventKind.ERROR_RAISED) == 2
    assert [record.detail["code"] for record in event_log.select(EventKind.ERROR_RAISED, node="DRV")] == [21, 24]
    assert event_log.first(EventKind.ERROR_RAISED, code=24).detail["code"] == 24
    assert event_log.first(EventKind.WAKE) is None
    assert len(event_log) == 3


def test_event_detail_is_read_only(event_log: EventLog):
    record = event_log.append("BTS", EventKind.ADVERT_CHANGED, name="MIScooter0001")

    with pytest.raises(TypeError):
        record.detail["name"] = "x"  # type: ignore[index]


def test_named_streams_are_independent_of_consumption_order():
    first = RandomStreams(7)
    second = RandomStreams(7)

    first.random_bytes("serial", 8)
    a = first.random_bytes("unlock-code", 16)
    b = second.random_bytes("unlock-code", 16)

    assert a == b
    assert RandomStreams(8).random_bytes("unlock-code", 16) != a


def test_stream_integer_is_within_bounds():
    streams = RandomStreams(3)
    values = [streams.integer("dice", 1, 7) for _ in range(200)]

    assert min(values) >= 1
    assert max(values) <= 6
