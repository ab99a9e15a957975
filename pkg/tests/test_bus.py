"""
Tests du bus UART : codec des trames, rôles par commande, canal sécurisé, seau percé et médium de diffusion.
"""

import math

import numpy as np
import pytest

from bus import (
    Command,
    FrameError,
    InvalidHeaderError,
    KeyMismatchError,
    LeakyBucket,
    MacFailureError,
    NodeId,
    NotEstablishedError,
    OversizePayloadError,
    PacketType,
    ReplayDetectedError,
    SecureChannelManager,
    SenderRateLimiter,
    TruncatedFrameError,
    UartBus,
    UartFrame,
    decode_frame,
    encode_frame,
    establish,
    format_frame_line,
    is_allowed,
    provision_channel,
    unwrap,
    wrap,
)
from config import BusConfig
from simkern import EventKind, EventLog, RandomStreams, SimKernel

PSK = bytes(range(16))
HOST_CHALLENGE = b"hostchal"
CARD_CHALLENGE = b"cardchal"


def random_frame(rng: np.random.Generator, max_payload: int = 64) -> UartFrame:
    sender, receiver, ptype, command = (int(value) for value in rng.integers(0, 256, size=4))
    payload = rng.bytes(int(rng.integers(0, max_payload + 1)))

    return UartFrame(sender=sender, receiver=receiver, ptype=ptype, command=command, payload=payload)


def test_encode_matches_wire_layout():
    frame = UartFrame(NodeId.BTS, NodeId.DRV, PacketType.READ, Command.PASSWORD_HASH)

    assert encode_frame(frame) == bytes.fromhex("55aa0020230117a5fe")
    assert format_frame_line(5, frame) == "t=5 BTS→DRV type=READ cmd=PASSWORD_HASH(0x17) payload= crc=fea5"


def test_wrapped_frame_line_is_tagged():
    frame = UartFrame(NodeId.BCTRL, NodeId.BTS, PacketType.NOTIFY | 0x80, Command.BATT_LEVEL, b"\x32")

    assert format_frame_line(0, frame).endswith(" [wrapped]")
    assert "type=NOTIFY" in format_frame_line(0, frame)


def test_decode_inverts_encode(rng: np.random.Generator):
    for _ in range(1000):
        frame = random_frame(rng)

        assert decode_frame(encode_frame(frame)) == frame


def test_every_single_bit_flip_is_detected(rng: np.random.Generator):
    for _ in range(100):
        wire = bytearray(encode_frame(random_frame(rng)))

        for bit in range(len(wire) * 8):
            mutated = bytearray(wire)
            mutated[bit // 8] ^= 1 << (bit % 8)

            with pytest.raises(FrameError):
                decode_frame(bytes(mutated))


def test_oversize_payload_is_refused():
    with pytest.raises(OversizePayloadError):
        encode_frame(UartFrame(NodeId.BTS, NodeId.DRV, PacketType.WRITE, Command.LOCK, bytes(65)))

    with pytest.raises(OversizePayloadError):
        decode_frame(b"\x55\xaa\x41" + bytes(80))


def test_truncated_and_bad_header_frames_are_refused():
    wire = encode_frame(UartFrame(NodeId.BTS, NodeId.DRV, PacketType.WRITE, Command.LOCK, b"\x01"))

    with pytest.raises(TruncatedFrameError):
        decode_frame(wire[:-1])

    with pytest.raises(TruncatedFrameError):
        decode_frame(b"\x55")

    with pytest.raises(InvalidHeaderError):
        decode_frame(b"\xaa\x55" + wire[2:])


def test_command_roles():
    assert is_allowed(NodeId.DRV, NodeId.BTS, Command.PASSWORD_HASH)
    assert not is_allowed(NodeId.DRV, NodeId.BCTRL, Command.PASSWORD_HASH)
    assert is_allowed(NodeId.DRV, NodeId.BCTRL, Command.POWER_OFF)
    assert not is_allowed(NodeId.BTS, NodeId.BCTRL, Command.BLE_ADVERT)
    assert is_allowed(NodeId.BCTRL, NodeId.BTS, Command.UPDATE_START)
    assert not is_allowed(NodeId.BCTRL, NodeId.EXTERNAL, Command.UPDATE_START)
    assert is_allowed(NodeId.BTS, NodeId.BCTRL, Command.BATT_LEVEL)


@pytest.fixture
def session_pair():
    return establish(NodeId.BTS, NodeId.DRV, PSK, PSK, HOST_CHALLENGE, CARD_CHALLENGE)


def test_wrap_then_unwrap_restores_the_frame(session_pair, rng: np.random.Generator):
    sender_side, receiver_side = session_pair

    for counter in range(1, 1001):
        command = int(rng.integers(0, 128))
        frame = UartFrame(NodeId.BTS, NodeId.DRV, PacketType.WRITE, command, rng.bytes(int(rng.integers(0, 53))))
        protected = wrap(sender_side, frame)

        assert protected.wrapped
        assert sender_side.tx_counter == counter
        assert unwrap(receiver_side, protected) == frame
        assert receiver_side.rx_counter == counter


def test_any_tampered_bit_fails_authentication(session_pair, rng: np.random.Generator):
    sender_side, receiver_side = session_pair
    protected = wrap(sender_side, UartFrame(NodeId.BTS, NodeId.DRV, PacketType.WRITE, Command.LOCK, b"\x01\x02"))

    for _ in range(1000):
        position = int(rng.integers(0, len(protected.payload) * 8))
        payload = bytearray(protected.payload)
        payload[position // 8] ^= 1 << (position % 8)
        tampered = UartFrame(protected.sender, protected.receiver, protected.ptype, protected.command, bytes(payload))

        with pytest.raises(MacFailureError):
            unwrap(receiver_side, tampered)

    spoofed = UartFrame(NodeId.BCTRL, protected.receiver, protected.ptype, protected.command, protected.payload)

    with pytest.raises(MacFailureError):
        unwrap(receiver_side, spoofed)

    assert receiver_side.rx_counter == 0


def test_replayed_frame_is_refused(session_pair):
    sender_side, receiver_side = session_pair
    protected = wrap(sender_side, UartFrame(NodeId.BTS, NodeId.DRV, PacketType.WRITE, Command.RESET))

    unwrap(receiver_side, protected)

    with pytest.raises(ReplayDetectedError) as error:
        unwrap(receiver_side, protected)

    assert error.value.counter == 1


def test_mismatched_keys_do_not_establish():
    with pytest.raises(KeyMismatchError):
        establish(NodeId.BTS, NodeId.DRV, PSK, bytes(16), HOST_CHALLENGE, CARD_CHALLENGE)


def test_unestablished_session_refuses_to_wrap(session_pair):
    sender_side, _ = session_pair
    sender_side.established = False

    with pytest.raises(NotEstablishedError):
        wrap(sender_side, UartFrame(NodeId.BTS, NodeId.DRV, PacketType.WRITE, Command.LOCK))


def test_provisioned_channel_covers_every_internal_pair():
    manager = provision_channel(RandomStreams(7))

    assert len(manager.sessions) == 12
    assert manager.has_sessions(NodeId.BCTRL)
    assert not manager.has_sessions(NodeId.EXTERNAL)

    frame = UartFrame(NodeId.BTS, NodeId.BCTRL, PacketType.UPDATE_CTL, Command.UPDATE_START, b"\x00\x10")
    assert manager.unwrap_at(NodeId.BCTRL, manager.wrap_from(NodeId.BTS, frame)) == frame


def test_spoofed_sender_cannot_borrow_another_session():
    manager = provision_channel(RandomStreams(7))
    frame = UartFrame(NodeId.BTS, NodeId.DRV, PacketType.READ, Command.PASSWORD_HASH)
    spoofed = manager.wrap_from(NodeId.BCTRL, frame)

    with pytest.raises(MacFailureError):
        manager.unwrap_at(NodeId.DRV, spoofed)

    with pytest.raises(NotEstablishedError):
        SecureChannelManager().wrap_from(NodeId.EXTERNAL, spoofed)


def test_bucket_starts_full_and_drops_beyond_capacity():
    bucket = LeakyBucket(capacity=8, drain_rate=40)

    assert [bucket.admit(0) for _ in range(9)] == [True] * 8 + [False]
    assert not bucket.admit(24)
    assert bucket.admit(25)


def test_bucket_rejects_invalid_parameters():
    with pytest.raises(ValueError):
        LeakyBucket(capacity=0, drain_rate=40)

    with pytest.raises(ValueError):
        LeakyBucket(capacity=8, drain_rate=0)


def test_traffic_at_the_drain_rate_is_never_dropped(rng: np.random.Generator):
    for _ in range(1000):
        capacity = int(rng.integers(1, 17))
        drain_rate = int(rng.integers(1, 201))
        interval = math.ceil(1000 / drain_rate)
        start = int(rng.integers(0, 10_000))
        bucket = LeakyBucket(capacity=capacity, drain_rate=drain_rate)

        assert all(bucket.admit(start + step * interval) for step in range(40))


def test_rate_limiter_counts_drops_per_sender():
    limiter = SenderRateLimiter(capacity=2, drain_rate=1)

    results = [limiter.admit(NodeId.EXTERNAL, 0) for _ in range(5)]

    assert results == [True, True, False, False, False]
    assert limiter.admit(NodeId.BTS, 0)
    assert limiter.dropped == {NodeId.EXTERNAL: 3}


class Node:
    def __init__(self, bus: UartBus, code: int, powered: bool = True) -> None:
        self.received: list[UartFrame] = []
        self.powered = powered
        bus.attach(code, self.received.append, lambda: self.powered)


@pytest.fixture
def bus_factory(kernel: SimKernel, event_log: EventLog):
    def _make(secure: bool = False, rate_limited: bool = False) -> UartBus:
        config = BusConfig()

        return UartBus(
            kernel=kernel,
            event_log=event_log,
            config=config,
            channel=provision_channel(RandomStreams(7)) if secure else None,
            rate_limiter=(
                SenderRateLimiter(config.rate_limit_capacity, config.rate_limit_drain_fps) if rate_limited else None
            ),
        )

    return _make


def test_frames_reach_only_the_addressed_powered_node(bus_factory, kernel: SimKernel):
    bus = bus_factory()
    bts, drv = Node(bus, NodeId.BTS), Node(bus, NodeId.DRV)
    bctrl = Node(bus, NodeId.BCTRL, powered=False)

    assert bus.send(NodeId.BTS, UartFrame(NodeId.BTS, NodeId.DRV, PacketType.READ, Command.MILEAGE))
    kernel.run(until=10)

    assert len(drv.received) == 1
    assert bts.received == []
    assert bctrl.received == []
    assert len(bus.observed(NodeId.BTS)) == 1
    assert bus.observed(NodeId.BCTRL) == []
    assert bus.counters.frames_sent == 1
    assert bus.frame_dump[0].startswith("t=0 BTS→DRV type=READ cmd=MILEAGE(0x29)")


def test_unpowered_node_cannot_send(bus_factory):
    bus = bus_factory()
    Node(bus, NodeId.DRV)
    Node(bus, NodeId.BCTRL, powered=False)

    assert not bus.send(NodeId.BCTRL, UartFrame(NodeId.BCTRL, NodeId.DRV, PacketType.WRITE, Command.POWER_OFF))


def test_spoofed_sender_is_accepted_without_secure_channel(bus_factory, kernel: SimKernel):
    bus = bus_factory()
    drv = Node(bus, NodeId.DRV)
    Node(bus, NodeId.BCTRL)

    bus.send(NodeId.BCTRL, UartFrame(NodeId.BTS, NodeId.DRV, PacketType.WRITE, Command.LOCK))
    kernel.run(until=10)

    assert [frame.sender for frame in drv.received] == [NodeId.BTS]


def test_command_from_the_wrong_role_is_rejected(bus_factory, kernel: SimKernel, event_log: EventLog):
    bus = bus_factory()
    drv = Node(bus, NodeId.DRV)
    Node(bus, NodeId.BCTRL)

    bus.send(NodeId.BCTRL, UartFrame(NodeId.BCTRL, NodeId.DRV, PacketType.READ, Command.PASSWORD_HASH))
    kernel.run(until=10)

    assert drv.received == []
    assert bus.counters.frames_rejected == 1
    assert event_log.first(EventKind.FRAME_REJECTED, node="DRV", reason="AccessDenied") is not None


def test_secure_channel_delivers_plain_frames_between_legitimate_nodes(bus_factory, kernel: SimKernel):
    bus = bus_factory(secure=True)
    drv = Node(bus, NodeId.DRV)
    Node(bus, NodeId.BTS)
    frame = UartFrame(NodeId.BTS, NodeId.DRV, PacketType.WRITE, Command.LOCK, b"\x01")

    bus.send(NodeId.BTS, frame)
    kernel.run(until=10)

    assert drv.received == [frame]
    assert bus.frame_dump[0].endswith("[wrapped]")


def test_secure_channel_rejects_spoofed_frames(bus_factory, kernel: SimKernel, event_log: EventLog):
    bus = bus_factory(secure=True)
    drv = Node(bus, NodeId.DRV)
    Node(bus, NodeId.BCTRL)

    bus.send(NodeId.BCTRL, UartFrame(NodeId.BTS, NodeId.DRV, PacketType.WRITE, Command.LOCK))
    bus.send(NodeId.EXTERNAL, UartFrame(NodeId.BTS, NodeId.DRV, PacketType.WRITE, Command.RESET))
    kernel.run(until=10)

    assert drv.received == []
    reasons = [record.detail["reason"] for record in event_log.select(EventKind.FRAME_REJECTED)]
    assert reasons == ["MacFailure", "Unauthenticated"]


def test_secure_channel_authenticates_the_charger(bus_factory, kernel: SimKernel, event_log: EventLog):
    bus = bus_factory(secure=True)
    bctrl = Node(bus, NodeId.BCTRL)
    Node(bus, NodeId.CHARGER)
    status = UartFrame(NodeId.CHARGER, NodeId.BCTRL, PacketType.NOTIFY, Command.CHARGER_STATUS, b"\x01")

    bus.send(NodeId.CHARGER, status)
    bus.send(NodeId.EXTERNAL, status)
    kernel.run(until=10)

    assert bctrl.received == [status]
    assert [record.detail["reason"] for record in event_log.select(EventKind.FRAME_REJECTED)] == ["Unauthenticated"]


def test_flood_saturates_the_bus(bus_factory, kernel: SimKernel, event_log: EventLog):
    bus = bus_factory()
    drv = Node(bus, NodeId.DRV)
    Node(bus, NodeId.BTS)

    bus.start_flood(NodeId.EXTERNAL, rate_fps=2000)

    assert bus.flooding
    assert not bus.send(NodeId.BTS, UartFrame(NodeId.BTS, NodeId.DRV, PacketType.WRITE, Command.LOCK))
    assert bus.counters.legit_frames_dropped == 1
    assert event_log.first(EventKind.FRAME_DROPPED, reason="bus-saturated") is not None

    kernel.run(until=450)
    bus.stop_flood()
    kernel.run(until=550)

    assert not bus.flooding
    assert bus.counters.flood_dropped > 0
    assert bus.send(NodeId.BTS, UartFrame(NodeId.BTS, NodeId.DRV, PacketType.WRITE, Command.LOCK))
    kernel.run(until=560)
    assert len(drv.received) == 1


def frame_count(event_log: EventLog, kind: EventKind, **detail) -> int:
    return sum(record.detail["count"] for record in event_log.select(kind, **detail))


@pytest.mark.parametrize("rate_limited", [False, True], ids=["open", "rate-limited"])
def test_flood_frames_are_counted_in_the_event_log(bus_factory, kernel: SimKernel, event_log: EventLog, rate_limited):
    bus = bus_factory(rate_limited=rate_limited)
    Node(bus, NodeId.DRV)
    Node(bus, NodeId.BTS)

    bus.start_flood(NodeId.EXTERNAL, rate_fps=2000)
    bus.send(NodeId.BTS, UartFrame(NodeId.BTS, NodeId.DRV, PacketType.WRITE, Command.LOCK))
    kernel.run(until=450)
    bus.stop_flood()

    assert bus.counters.frames_sent > 0
    assert frame_count(event_log, EventKind.FRAME_SENT) == bus.counters.frames_sent
    assert frame_count(event_log, EventKind.FRAME_DROPPED, flood=True) == bus.counters.flood_dropped
    assert frame_count(event_log, EventKind.FRAME_DROPPED, flood=False) == bus.counters.frames_dropped
    assert bus.counters.flood_frames == bus.counters.flood_dropped + frame_count(
        event_log, EventKind.FRAME_SENT, flood=True
    )


def test_rate_limiter_keeps_the_bus_available_under_flood(bus_factory, kernel: SimKernel):
    bus = bus_factory(rate_limited=True)
    drv = Node(bus, NodeId.DRV)
    Node(bus, NodeId.BTS)

    bus.start_flood(NodeId.EXTERNAL, rate_fps=2000)

    assert bus.send(NodeId.BTS, UartFrame(NodeId.BTS, NodeId.DRV, PacketType.WRITE, Command.LOCK))
    kernel.run(until=10)

    assert len(drv.received) == 1
    assert bus.counters.flood_dropped == 192
    assert NodeId.EXTERNAL in bus.rate_limiter.dropped
