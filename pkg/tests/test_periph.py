"""
Tests des périphériques : BTS, DRV, chargeur, renifleur, interrupteur d'alimentation et utilisateur
scripté.
"""

import hashlib

import pytest

from bus import Command, NodeId, PacketType, UartFrame
from config import Profile, SimulationConfig, UserBehavior
from fwpipe import FirmwareImage, FirmwareTarget
from periph import (
    BtsState,
    DrvState,
    ErrorCode,
    LockState,
    Sniffer,
    UnknownFieldError,
    default_ble_name,
    make_drv_id,
)
from simkern import EventKind, RandomStreams
from simulation import ScooterSystem

DRV_ID = b"16133/21081512"


def test_drv_serial_and_default_name():
    drv_id = make_drv_id("16133/", RandomStreams(7))

    assert len(drv_id) == 14
    assert drv_id.startswith(b"16133/")
    assert drv_id == make_drv_id("16133/", RandomStreams(7))
    assert default_ble_name(DRV_ID) == b"MIScooter1512"


def test_drv_fields_are_encoded_for_reads(simulation_config: SimulationConfig):
    state = DrvState.from_config(DRV_ID, "1.5.5", simulation_config.drv_data)

    assert state.read_field(Command.DRV_ID) == DRV_ID
    assert state.read_field(Command.PASSWORD_HASH) == hashlib.sha256(b"123456").digest()
    assert state.read_field(Command.MILEAGE) == (433).to_bytes(2, "big")
    assert state.read_field(Command.LAST_TRAVEL_KM) == (12).to_bytes(2, "big")

    with pytest.raises(UnknownFieldError):
        state.read_field(Command.BATT_LEVEL)


def test_state_size_limits():
    with pytest.raises(ValueError):
        DrvState(drv_id=b"short", password_hash=bytes(32), version="1.5.5")

    with pytest.raises(ValueError):
        BtsState(ble_name=b"x" * 15, default_name=b"MIScooter1512", version="1.4.3")


def test_error_codes():
    assert ErrorCode.E21.powers_off
    assert ErrorCode.E24.powers_off
    assert not ErrorCode.E23.powers_off
    assert ErrorCode.E24.description == "Supply Voltage out of range"


def test_sniffer_windows_and_serialization():
    sniffer = Sniffer()
    sniffer.observe(5, b"hi")
    sniffer.observe(300, b"MIScooter1512")

    assert sniffer.names(start=100) == [b"MIScooter1512"]
    assert [advert.t for advert in sniffer.window(0, 300)] == [5]
    assert sniffer.to_jsonl().splitlines()[0] == '{"advName":"6869","t":5}'


def test_power_on_is_refused_in_ship_mode(system: ScooterSystem):
    system.bmon.regs.enter_ship_mode()

    assert not system.power.power_on(source="user")
    assert system.event_log.first(EventKind.POWER_ON_FAILED, reason="ship-mode") is not None
    assert not system.power.nodes_powered()


def test_powered_scooter_reads_the_drv_serial_and_auto_offs(system: ScooterSystem):
    system.start()
    system.kernel.run(until=system.config.timing.auto_off_ms + 1000)

    assert system.bts.state.drv_serial == system.drv.state.drv_id
    assert system.bts.state.batt_level is not None
    assert system.sniffer.names() == [system.bts.state.default_name]
    assert system.event_log.count(EventKind.ERROR_RAISED) == 0
    assert system.event_log.first(EventKind.POWER_OFF, reason="auto-off") is not None


def test_present_user_keeps_the_scooter_on(scenario_factory, simulation_config: SimulationConfig):
    system = ScooterSystem(scenario_factory(user_behavior=UserBehavior.PRESENT), simulation_config)
    system.start()
    system.kernel.run(until=40_000)

    assert system.power.nodes_powered()
    assert system.event_log.count(EventKind.POWER_OFF) == 0
    assert system.drv.rideable_ms > 0


def test_ble_name_change_reboots_then_advertises(system: ScooterSystem):
    system.power.power_on(source="test")
    system.bts.ble_set_name(b"https://t.ly/AaBbCc")

    assert not system.bts.state.advertising
    assert system.bts.reboots == 1
    assert system.event_log.first(EventKind.WARNING, reason="name-truncated") is not None

    system.kernel.run(until=system.config.timing.bts_reboot_ms)

    assert system.bts.state.advertising
    assert system.sniffer.names()[-1] == b"https://t.ly/A"


def test_factory_reset_restores_the_name_and_unpairs(system: ScooterSystem):
    system.power.power_on(source="test")
    system.kernel.run(until=10)
    system.bts.ble_set_name(b"pwned")
    system.drv.lock()

    system.bts.factory_reset()
    system.kernel.run(until=500)

    assert system.bts.state.ble_name == system.bts.state.default_name
    assert not system.bts.state.paired
    assert system.drv.state.lock_state is LockState.UNLOCKED
    assert system.event_log.first(EventKind.FACTORY_RESET, node="DRV") is not None
    assert system.sniffer.names()[-1] == system.bts.state.default_name

    system.bts.pair()
    assert system.bts.state.paired


def test_drv_answers_reads_to_the_announced_sender(system: ScooterSystem):
    system.power.power_on(source="test")
    system.bts.send_frame(NodeId.DRV, PacketType.READ, Command.MILEAGE)
    system.kernel.run(until=10)

    replies = [
        frame
        for _, frame in system.bus.observed(NodeId.BTS)
        if frame.command == Command.MILEAGE and frame.ptype == PacketType.NOTIFY
    ]

    assert [frame.payload for frame in replies] == [(433).to_bytes(2, "big")]
    assert replies[0].receiver == NodeId.BTS


def test_missing_bms_replies_raise_error_21_then_power_off(system: ScooterSystem):
    timing = system.config.timing
    system.power.power_on(source="test")
    system.kernel.run(until=timing.bms_timeout_ms)

    system.drv.tick(100)

    assert system.drv.state.error_state is ErrorCode.E21
    assert system.event_log.first(EventKind.ERROR_RAISED, code="E21", source="timeout") is not None

    system.kernel.run(until=timing.bms_timeout_ms + timing.error_power_off_ms)

    assert system.event_log.first(EventKind.POWER_OFF, reason="E21") is not None
    assert system.drv.state.error_state is None


def test_error_23_beeps_without_powering_off(system: ScooterSystem):
    system.power.power_on(source="test")
    system.bts.send_app_command(NodeId.DRV, Command.RAISE_ERROR, bytes([23]))
    system.kernel.run(until=3500)

    assert system.drv.state.error_state is ErrorCode.E23
    assert system.event_log.count(EventKind.BEEP) >= 3
    assert system.event_log.count(EventKind.POWER_OFF) == 0


def test_unknown_error_code_is_ignored(system: ScooterSystem):
    system.power.power_on(source="test")
    system.bts.send_app_command(NodeId.DRV, Command.RAISE_ERROR, bytes([99]))
    system.kernel.run(until=10)

    assert system.drv.state.error_state is None


def test_drv_voltage_check_raises_error_24(scenario_factory, simulation_config: SimulationConfig):
    system = ScooterSystem(scenario_factory(profile=Profile.ES3, user_behavior=UserBehavior.PARKED), simulation_config)
    system.power.power_on(source="test")
    system.drv.state.motor_voltage_mv = 1500.0

    assert system.drv.drv_voltage_check() is ErrorCode.E24
    assert system.drv.drv_voltage_check() is None
    assert system.event_log.count(EventKind.ERROR_RAISED) == 1
    assert not simulation_config.profile(Profile.M365).drv_check_active


def test_three_resets_in_the_window_flag_a_loop_and_keep_the_lock(system: ScooterSystem):
    system.power.power_on(source="test")
    system.drv.lock()

    for at in (1000, 11_000, 21_000, 31_000):
        system.kernel.run(until=at)
        system.drv.reset()

    assert system.drv.power_cycles == 4
    assert system.event_log.count(EventKind.POWER_CYCLE_LOOP) == 1
    assert system.drv.state.locked
    assert system.power.nodes_powered()


def test_locked_motor_is_not_rideable(system: ScooterSystem):
    system.power.power_on(source="test")
    system.drv.lock()
    system.drv.last_bms_reply_ms = 10_000

    system.kernel.run(until=1000)
    system.drv.tick(100)

    assert system.drv.rideable_ms == 0
    assert system.event_log.first(EventKind.LOCK, locked=True) is not None


def test_spoofed_sender_cannot_use_bts_only_commands(system: ScooterSystem):
    system.power.power_on(source="test")
    frame = UartFrame(NodeId.BCTRL, NodeId.DRV, PacketType.WRITE, Command.LOCK)

    system.bus.send(NodeId.BCTRL, frame)
    system.kernel.run(until=10)

    assert not system.drv.state.locked
    assert system.event_log.first(EventKind.FRAME_REJECTED, reason="AccessDenied") is not None


def test_bts_delivers_a_drv_update(system: ScooterSystem):
    system.power.power_on(source="test")
    image = system.drv_update_image()

    assert system.bts.deliver_image(image)
    system.kernel.run(until=5000)

    assert system.drv.state.version == "1.5.6"
    assert system.event_log.first(EventKind.INSTALL_ACCEPTED, node="DRV") is not None


def test_protected_drv_refuses_a_plain_update(scenario_factory, simulation_config: SimulationConfig):
    system = ScooterSystem(scenario_factory(profile=Profile.ES3, user_behavior=UserBehavior.PARKED), simulation_config)
    system.power.power_on(source="test")

    assert not system.drv.install(FirmwareImage.plain(FirmwareTarget.DRV, "0.2.0", bytes(64)))
    assert system.drv.install(system.drv_update_image())
    assert system.drv.state.version == "0.1.10"
    assert system.event_log.first(EventKind.INSTALL_REJECTED, reason="EncryptionRequired") is not None


def test_bts_cannot_deliver_while_off(system: ScooterSystem):
    assert not system.bts.deliver_image(system.drv_update_image())


def test_charger_wakes_the_monitor_and_announces_itself(system: ScooterSystem):
    system.bmon.regs.enter_ship_mode()

    system.user.connect_charger()
    system.kernel.run(until=10)

    assert not system.bmon.ship_mode
    assert system.charger.target_cell_mv == 4200.0
    assert system.event_log.first(EventKind.CHARGER, connected=True, voltage_mv=42000) is not None
    assert any("cmd=CHARGER_STATUS(0x60)" in line for line in system.bus.frame_dump)

    system.charger.disconnect()
    assert not system.charger.connected


def test_user_unlock_attempts_power_the_scooter(system: ScooterSystem):
    assert system.user.attempt_unlock()

    assert system.user.unlock_attempts == 1
    assert system.user.power_on_attempts == 1
    assert system.power.nodes_powered()
