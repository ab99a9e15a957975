"""
Tests du contrôleur de batterie : branches de la boucle principale, corps de micrologiciel, réception
des mises à jour, verrou DFU et primitives réservées aux capacités installées.
"""

import numpy as np
import pytest

from battery import I2cMessage, Register, Thresholds
from bctrl import (
    BctrlFirmware,
    CapabilityUnavailableError,
    Capability,
    CellSummary,
    DdtThresholds,
    FirmwareBodyError,
    FirmwareReceiver,
    FwUpdateState,
    PatchSet,
    PayloadKind,
    ScvSpoof,
    decode_firmware_body,
    encode_firmware_body,
    evaluate_branches,
    stock_code,
    update_frames,
)
from bus import Command, NodeId, PacketType, UartFrame
from fwpipe import FirmwareImage, FirmwareTarget
from simkern import EventKind, EventLog
from simulation import ScooterSystem

VERSION = "1.2.1"
UNLOCK_CODE = bytes(range(1, 17))


def reference_branches(voltages: list[int], thresholds: Thresholds, dlb: bool, dct: bool) -> tuple[bool, bool, bool]:
    live = [voltage for voltage in voltages if voltage > 0]

    if not live:
        return False, False, False

    return (
        max(live) - min(live) >= thresholds.c_lbd and not dlb,
        min(live) < thresholds.c_uvt and not dct,
        max(live) > thresholds.c_ovt and not dct,
    )


def test_main_loop_branches_match_the_reference(rng: np.random.Generator):
    thresholds = Thresholds()

    for _ in range(2000):
        voltages = [int(value) for value in rng.integers(0, 5000, size=10)]
        voltages = [0 if rng.random() < 0.1 else voltage for voltage in voltages]
        dlb, dct = bool(rng.random() < 0.5), bool(rng.random() < 0.5)
        summary = CellSummary.from_voltages(voltages, batt_level=50)

        branches = evaluate_branches(summary, thresholds, PatchSet(dlb=dlb, dct=dct))

        expected = reference_branches(voltages, thresholds, dlb, dct)
        assert (branches.balance, branches.under_voltage, branches.over_voltage) == expected
        assert branches.sleep == any(expected)
        assert branches.protect == (expected[1] or expected[2])


def test_open_groups_are_left_out_of_the_summary():
    summary = CellSummary.from_voltages([3700, 0, 3600, 3900, 0, 3700, 3700, 3700, 3700, 3700], batt_level=40)

    assert summary.min_mv == 3600
    assert summary.max_mv == 3900
    assert summary.delta_mv == 300
    assert summary.live_groups == 8
    assert CellSummary.from_voltages([0] * 10, batt_level=40).batt_level == 0


def test_patch_set_capabilities():
    patch_set = PatchSet.from_capabilities({Capability.DFU, Capability.DDT, Capability.SCV})

    assert patch_set.capabilities == frozenset({Capability.DFU, Capability.DDT, Capability.SCV})
    assert patch_set.ddt == DdtThresholds(uv_trip=1580, ov_trip=4700)
    assert patch_set.scv_spoof == ScvSpoof(group_index=1, spoofed_mv=3700)
    assert patch_set.to_bits() == 0b1000001001
    assert PatchSet().is_stock

    with pytest.raises(ValueError):
        PatchSet(scv=True)

    with pytest.raises(ValueError):
        ScvSpoof(group_index=11, spoofed_mv=3700)


def test_firmware_body_carries_the_descriptor():
    firmware = BctrlFirmware(
        version=VERSION,
        patch_set=PatchSet.from_capabilities(
            {Capability.DFU, Capability.MUB, Capability.CBA, Capability.DDT},
            ddt=DdtThresholds(uv_trip=1600, ov_trip=4650),
        ),
        payload=PayloadKind.UBR,
        unlock_code=UNLOCK_CODE,
        ransom_url=b"t.ly/AaBbCc",
        code=stock_code(VERSION),
    )

    assert decode_firmware_body(VERSION, encode_firmware_body(firmware)) == firmware
    assert decode_firmware_body(VERSION, encode_firmware_body(BctrlFirmware(version=VERSION))).code == stock_code(VERSION)


def test_unreadable_firmware_bodies_are_refused():
    body = encode_firmware_body(BctrlFirmware(version=VERSION))

    with pytest.raises(FirmwareBodyError):
        decode_firmware_body(VERSION, body[:20])

    with pytest.raises(FirmwareBodyError):
        decode_firmware_body(VERSION, b"XXXX" + body[4:])

    with pytest.raises(FirmwareBodyError):
        decode_firmware_body(VERSION, body[:13] + b"\x63" + body[14:])


def test_firmware_descriptor_limits():
    with pytest.raises(ValueError):
        BctrlFirmware(version=VERSION, unlock_code=b"short")

    with pytest.raises(ValueError):
        BctrlFirmware(version=VERSION, ransom_url=b"https://example.org/pay")


def test_receiver_reassembles_an_image(event_log: EventLog):
    image = FirmwareImage.plain(FirmwareTarget.BCTRL, VERSION, encode_firmware_body(BctrlFirmware(version=VERSION)))
    receiver = FirmwareReceiver(NodeId.BCTRL, FirmwareTarget.BCTRL, event_log)
    frames = update_frames(NodeId.BTS, NodeId.BCTRL, FirmwareTarget.BCTRL, image.to_bytes(), chunk_size=40)

    results = [receiver.handle(frame) for frame in frames]

    assert results[-1] == image
    assert all(result is None for result in results[:-1])
    assert [frame.command for frame in (frames[0], frames[1], frames[-2], frames[-1])] == [
        Command.UPDATE_START,
        Command.UPDATE_CHUNK,
        Command.UPDATE_VERIFY,
        Command.UPDATE_FINALIZE,
    ]


@pytest.mark.parametrize(
    "reorder, reason",
    [
        (lambda frames: [frames[0], frames[2], frames[1], *frames[3:]], "OutOfOrder"),
        (lambda frames: [frames[0], frames[-2], *frames[1:-2], frames[-1]], "Incomplete"),
        (lambda frames: [frames[0], *frames[1:-2], frames[-1]], "NotValidated"),
        (lambda frames: frames[1:], "UnexpectedChunk"),
    ],
    ids=["out-of-order", "verify-too-early", "finalize-without-verify", "chunk-without-start"],
)
def test_receiver_resets_on_protocol_errors(event_log: EventLog, reorder, reason):
    image = FirmwareImage.plain(FirmwareTarget.BCTRL, VERSION, encode_firmware_body(BctrlFirmware(version=VERSION)))
    receiver = FirmwareReceiver(NodeId.BCTRL, FirmwareTarget.BCTRL, event_log)
    frames = update_frames(NodeId.BTS, NodeId.BCTRL, FirmwareTarget.BCTRL, image.to_bytes(), chunk_size=40)

    results = [receiver.handle(frame) for frame in reorder(frames)]

    assert all(result is None for result in results)
    assert event_log.first(EventKind.UPDATE_REJECTED, node="BCTRL").detail["reason"] == reason


def test_receiver_refuses_another_target(event_log: EventLog):
    receiver = FirmwareReceiver(NodeId.BCTRL, FirmwareTarget.BCTRL, event_log)
    start = update_frames(NodeId.BTS, NodeId.BCTRL, FirmwareTarget.DRV, bytes(100), chunk_size=40)[0]

    assert receiver.handle(start) is None
    assert receiver.session.state is FwUpdateState.IDLE
    assert event_log.first(EventKind.UPDATE_REJECTED, reason="WrongTarget") is not None


def install_patch(system: ScooterSystem, patch_set: PatchSet) -> None:
    firmware = BctrlFirmware(version=VERSION, patch_set=patch_set, unlock_code=UNLOCK_CODE)
    image = FirmwareImage.plain(FirmwareTarget.BCTRL, VERSION, encode_firmware_body(firmware))

    assert system.bctrl.install(image).accepted


def test_stock_boot_programs_the_stock_hardware_thresholds(system: ScooterSystem):
    assert system.bctrl.boot()

    assert system.bmon.regs.uv_trip == 2750
    assert system.bmon.regs.ov_trip == 4200
    assert system.event_log.first(EventKind.BOOT, node="BCTRL").detail["capabilities"] == []
    assert system.bctrl.state.can_fw_update


def test_ddt_programs_the_extreme_hardware_thresholds(system: ScooterSystem):
    install_patch(system, PatchSet.from_capabilities({Capability.DDT}))

    assert system.bmon.regs.uv_trip == 1580
    assert system.bmon.regs.ov_trip == 4700
    assert system.event_log.count(EventKind.INSTALL_ACCEPTED) == 1
    assert system.event_log.select(EventKind.BOOT, node="BCTRL")[-1].detail["capabilities"] == ["DDT"]


def test_dfu_locks_updates_until_the_exact_code(system: ScooterSystem):
    install_patch(system, PatchSet(dfu=True))
    bctrl = system.bctrl
    start = update_frames(NodeId.BTS, NodeId.BCTRL, FirmwareTarget.BCTRL, bytes(100), chunk_size=40)[0]

    assert not bctrl.state.can_fw_update
    assert bctrl.handle_update_frame(start) is None
    assert system.event_log.first(EventKind.UPDATE_REJECTED, reason="Locked") is not None

    wrong = UartFrame(NodeId.BTS, NodeId.BCTRL, PacketType.WRITE, Command.FW_UNLOCK, UNLOCK_CODE[::-1])
    right = UartFrame(NodeId.BTS, NodeId.BCTRL, PacketType.WRITE, Command.FW_UNLOCK, UNLOCK_CODE)

    assert not bctrl.handle_unlock_frame(wrong)
    assert system.event_log.count(EventKind.UNLOCK) == 0
    assert bctrl.handle_unlock_frame(right)
    assert bctrl.state.can_fw_update
    assert system.event_log.count(EventKind.UNLOCK) == 1


def test_dfu_lock_comes_back_after_reboot(system: ScooterSystem):
    install_patch(system, PatchSet(dfu=True))
    system.bctrl.handle_unlock_frame(
        UartFrame(NodeId.BTS, NodeId.BCTRL, PacketType.WRITE, Command.FW_UNLOCK, UNLOCK_CODE)
    )

    system.bctrl.reboot()

    assert not system.bctrl.state.can_fw_update


def test_update_frames_install_a_new_firmware(system: ScooterSystem):
    system.bctrl.boot()
    firmware = BctrlFirmware(version="1.2.2", patch_set=PatchSet(dlb=True))
    image = FirmwareImage.plain(FirmwareTarget.BCTRL, "1.2.2", encode_firmware_body(firmware))
    frames = update_frames(NodeId.BTS, NodeId.BCTRL, FirmwareTarget.BCTRL, image.to_bytes(), chunk_size=40)

    decisions = [system.bctrl.handle_update_frame(frame) for frame in frames]

    assert decisions[-1].accepted
    assert system.bctrl.state.fwver == "1.2.2"
    assert system.bctrl.state.patch_set.dlb
    assert system.event_log.first(EventKind.REBOOT, node="BCTRL") is not None


def test_primitives_require_their_capability(system: ScooterSystem):
    bctrl = system.bctrl
    bctrl.boot()

    with pytest.raises(CapabilityUnavailableError) as error:
        bctrl.spoof_frame(NodeId.BTS, NodeId.DRV, PacketType.WRITE, Command.LOCK)

    assert error.value.capability == "MUB"

    with pytest.raises(CapabilityUnavailableError):
        bctrl.spoof_i2c(I2cMessage.write(Register.UV_TRIP, 1000))

    with pytest.raises(CapabilityUnavailableError):
        bctrl.set_ble_name(b"pay.me")


def test_mib_writes_reach_the_monitor_within_its_ranges(system: ScooterSystem):
    install_patch(system, PatchSet(mib=True))

    assert system.bctrl.spoof_i2c(I2cMessage.write(Register.UV_TRIP, 1000)) == 1580
    assert system.bctrl.spoof_i2c(I2cMessage.write(Register.OV_TRIP, 9000)) == 4700
    assert system.bctrl.spoof_i2c(I2cMessage.read(Register.SYS_CTRL1)) == 0


def test_stock_controller_charges_and_reports_status(system: ScooterSystem):
    system.bctrl.charger_seen_ms = 0

    system.bctrl.tick()

    assert system.bctrl.charging
    assert system.event_log.first(EventKind.CHARGING, node="BCTRL", active=True) is not None
    assert any("cmd=BATT_LEVEL(0x32)" in line for line in system.bus.frame_dump)
    assert any("cmd=CELL_VOLTAGES(0x40)" in line for line in system.bus.frame_dump)


def test_dbc_refuses_to_charge(system: ScooterSystem):
    install_patch(system, PatchSet(dbc=True))
    system.bctrl.charger_seen_ms = 0

    system.bctrl.tick()

    assert not system.bctrl.charging
    assert system.event_log.first(EventKind.CHARGING, reason="charge-disabled") is not None


def test_scv_reports_a_spoofed_group_voltage(system: ScooterSystem):
    install_patch(system, PatchSet(scv=True, scv_spoof=ScvSpoof(group_index=3, spoofed_mv=3333)))

    system.bctrl.tick()

    assert system.bctrl.reported_voltages[2] == 3333
    assert system.bctrl.summary.min_mv == min(system.bmon.read_cell_voltages())
    assert system.bctrl.voltages_payload()[4:6] == (3333).to_bytes(2, "big")


def test_fbd_never_sleeps(system: ScooterSystem):
    install_patch(system, PatchSet(fbd=True))

    system.bctrl.enter_sleep("idle")

    assert not system.bctrl.state.sleep_mode
    assert system.bctrl.sleep_count == 0


def test_stock_controller_sleeps_when_idle(system: ScooterSystem):
    system.bctrl.boot()
    system.kernel.run(until=system.config.timing.idle_sleep_ms)

    system.bctrl.tick()

    assert system.bctrl.state.sleep_mode
    assert system.event_log.first(EventKind.SLEEP, node="BCTRL").detail["reason"] == "idle"
