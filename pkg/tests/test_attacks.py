"""
Tests des outils de l'attaquant : craquage du NIP, fragments d'empreinte, messages Track, service de
déverrouillage et fabrication des images malveillantes.
"""

import hashlib
import time

import numpy as np
import pytest

from attacks import (
    ATTACK_CAPABILITIES,
    PIN_PATTERNS,
    OutcomeLabel,
    PaymentRequiredError,
    ReassemblyError,
    ScenarioOutcome,
    StockFirmwareEncryptedError,
    TrackMessage,
    UbrConfig,
    UnknownSerialError,
    UnlockAuthority,
    any_cell_below_cuvt,
    build_track,
    craft_attack_image,
    crack_pin,
    decode_tracks,
    fingerprint_of,
    get_pin_table,
    hash_pin,
    install_rejected,
    is_fragment,
    is_track_name,
    patch_set_for,
    pattern_pins,
    read_stock_firmware,
    reassemble_hash,
    split_hash,
    step_failed,
    tracks_dataframe,
)
from battery import Thresholds
from bctrl import Capability, CellSummary, PayloadKind, decode_firmware_body, stock_code
from config import Attack, Countermeasure, Profile, SimulationConfig, UserBehavior
from fwpipe import FirmwareTarget, PolicyRule, RejectReason, verify_and_install
from periph import AdvertRecord
from simulation import ScooterSystem

DRV_ID = b"16133/21081512"


def adverts_of(*names: bytes) -> list[AdvertRecord]:
    return [AdvertRecord(t=index * 300, name=name) for index, name in enumerate(names)]


# Craquage du NIP


def test_seventy_pattern_pins():
    pins = pattern_pins()

    assert len(PIN_PATTERNS) == 7
    assert all(len(values) == 10 for values in PIN_PATTERNS.values())
    assert len(pins) == 70
    assert all(len(pin) == 6 and pin.isdigit() for pin in pins)
    assert "123456" in pins


def test_every_pattern_and_random_pin_is_cracked_in_under_a_second(rng: np.random.Generator):
    get_pin_table()
    pins = pattern_pins() + [f"{int(value):06d}" for value in rng.integers(0, 10**6, size=100)]

    for pin in pins:
        digest = reassemble_hash(adverts_of(*split_hash(hash_pin(pin)).fragments))

        assert digest == hashlib.sha256(pin.encode()).digest()

        started = time.perf_counter()
        recovered = crack_pin(digest)

        assert recovered == pin
        assert time.perf_counter() - started < 1.0


def test_exhaustive_search_tries_patterns_first():
    assert crack_pin(hash_pin("123456"), mode="exhaustive") == "123456"
    assert crack_pin(hash_pin("000007"), mode="exhaustive") == "000007"


def test_digest_outside_the_pin_space_is_not_cracked():
    assert crack_pin(hashlib.sha256(b"hunter2").digest()) is None


def test_crack_pin_argument_errors():
    with pytest.raises(ValueError):
        crack_pin(bytes(31))

    with pytest.raises(ValueError):
        crack_pin(hash_pin("123456"), mode="rainbow")


# Fragments de l'empreinte


def test_hash_is_split_into_three_indexed_names():
    digest = hash_pin("123456")
    fragments = split_hash(digest).fragments

    assert [len(fragment) for fragment in fragments] == [14, 14, 7]
    assert [fragment[0] for fragment in fragments] == [0, 1, 2]
    assert all(is_fragment(fragment) for fragment in fragments)
    assert not is_fragment(b"MIScooter1512")
    assert not is_fragment(b"")


def test_reassembly_ignores_noise_and_order():
    fragments = split_hash(hash_pin("654654")).fragments
    adverts = adverts_of(b"MIScooter1512", fragments[2], fragments[0], b"t.ly/AaBbCc", fragments[1])

    assert reassemble_hash(adverts) == hash_pin("654654")


def test_first_fragment_of_each_index_is_kept():
    first = split_hash(hash_pin("111111")).fragments
    later = split_hash(hash_pin("222222")).fragments

    assert reassemble_hash(adverts_of(*first, *later)) == hash_pin("111111")


def test_missing_fragment_is_reported():
    fragments = split_hash(hash_pin("123456")).fragments

    with pytest.raises(ReassemblyError) as error:
        reassemble_hash(adverts_of(fragments[0], fragments[1]))

    assert error.value.missing == [2]


def test_split_requires_a_sha256_digest():
    with pytest.raises(ValueError):
        split_hash(bytes(20))


# Pistage


def test_track_layout_matches_the_leaked_values():
    track = build_track(DRV_ID, mileage=433, batt_level=45)
    name = track.to_bytes()

    assert name == b"21081512" + bytes([0x01, 0xB1, 0x2D, 0, 0, 0])
    assert is_track_name(name)
    assert TrackMessage.from_bytes(name) == track
    assert fingerprint_of(DRV_ID) == b"21081512"


def test_track_fields_are_bounded():
    with pytest.raises(ValueError):
        TrackMessage(fingerprint=b"short", mileage=1, batt_level=1)

    with pytest.raises(ValueError):
        TrackMessage(fingerprint=bytes(8), mileage=70_000, batt_level=1)

    with pytest.raises(ValueError):
        TrackMessage.from_bytes(b"MIScooter1512")

    with pytest.raises(ValueError):
        fingerprint_of(b"1234")


def test_tracks_are_decoded_from_the_sniffer_and_filtered_by_fingerprint():
    ours = build_track(DRV_ID, 433, 45).to_bytes()
    other = build_track(b"16133/99999999", 10, 80).to_bytes()
    adverts = adverts_of(b"MIScooter1512", ours, other, ours)

    tracks = decode_tracks(adverts, fingerprint=fingerprint_of(DRV_ID))
    frame = tracks_dataframe(tracks)

    assert [t for t, _ in tracks] == [300, 900]
    assert len(decode_tracks(adverts)) == 3
    assert list(frame.columns) == ["t", "fingerprint", "mileage", "batt_level"]
    assert frame["mileage"].tolist() == [433, 433]
    assert frame["batt_level"].tolist() == [45, 45]


# Rançon


def test_ransom_url_must_fit_the_ble_name(simulation_config: SimulationConfig):
    with pytest.raises(ValueError):
        UbrConfig(ransom_url=b"https://example.org/pay")

    assert UbrConfig.from_settings(simulation_config.ubr).ransom_url == b"t.ly/AaBbCc"


def test_reveal_condition_watches_live_groups_below_cuvt():
    thresholds = Thresholds()
    healthy = CellSummary.from_voltages([3700] * 10, batt_level=50)
    damaged = CellSummary.from_voltages([3700] * 9 + [1500], batt_level=40)
    dead = CellSummary.from_voltages([0] * 10, batt_level=0)
    config = UbrConfig(ransom_url=b"t.ly/AaBbCc")

    assert not any_cell_below_cuvt(healthy, thresholds)
    assert any_cell_below_cuvt(damaged, thresholds)
    assert not any_cell_below_cuvt(dead, thresholds)
    assert config.notify_user(damaged, thresholds)


def test_unlock_code_is_released_only_after_payment():
    authority = UnlockAuthority()
    code = bytes(range(16))
    authority.register(DRV_ID, code)

    with pytest.raises(PaymentRequiredError):
        authority.unlock_firmware(DRV_ID)

    authority.simulate_payment(DRV_ID)

    assert authority.unlock_firmware(DRV_ID) == code


def test_unlock_authority_errors():
    authority = UnlockAuthority()

    with pytest.raises(UnknownSerialError):
        authority.simulate_payment(DRV_ID)

    with pytest.raises(ValueError):
        authority.register(DRV_ID, bytes(8))


# Images malveillantes


def test_attack_capabilities():
    assert patch_set_for(Attack.UBR).capabilities == frozenset(Capability)
    assert Capability.DBC in patch_set_for(Attack.DES5).capabilities
    assert Capability.FBD in patch_set_for(Attack.DES7).capabilities
    assert Capability.CBA not in ATTACK_CAPABILITIES[Attack.DES1]
    assert all(Capability.DFU in capabilities for capabilities in ATTACK_CAPABILITIES.values())

    with pytest.raises(KeyError):
        patch_set_for(Attack.NONE)


def test_stock_image_is_readable_without_encryption(system: ScooterSystem):
    firmware = read_stock_firmware(system.stock_bctrl_image(), system.keys.attacker_view())

    assert firmware.version == "1.2.1"
    assert firmware.code == stock_code("1.2.1")
    assert firmware.payload is PayloadKind.NONE


def test_only_battery_controller_images_are_patched(system: ScooterSystem):
    with pytest.raises(ValueError):
        read_stock_firmware(system.drv_update_image(), system.keys.attacker_view())


def test_crafted_image_carries_capabilities_payload_and_ransom(system: ScooterSystem):
    code = bytes(range(16))
    image = craft_attack_image(system, Attack.UBR, code)
    firmware = decode_firmware_body(image.version, image.body)

    assert image.target is FirmwareTarget.BCTRL
    assert image.version == system.stock_bctrl_image().version
    assert firmware.patch_set.capabilities == frozenset(Capability)
    assert firmware.payload is PayloadKind.UBR
    assert firmware.unlock_code == code
    assert firmware.ransom_url == b"t.ly/AaBbCc"
    assert firmware.code == stock_code("1.2.1")
    assert verify_and_install(image, PolicyRule(), system.keys, expected_target=FirmwareTarget.BCTRL).accepted


def test_reduced_capabilities_are_honoured(system: ScooterSystem):
    reduced = frozenset({Capability.DFU, Capability.MUB})
    image = craft_attack_image(system, Attack.PLR, bytes(16), capabilities=reduced)

    assert decode_firmware_body(image.version, image.body).patch_set.capabilities == reduced


def scooter(scenario_factory, simulation_config, *countermeasures: Countermeasure) -> ScooterSystem:
    scenario = scenario_factory(countermeasures=frozenset(countermeasures), user_behavior=UserBehavior.PARKED)

    return ScooterSystem(scenario, simulation_config)


def test_encrypted_stock_image_cannot_be_patched(scenario_factory, simulation_config: SimulationConfig):
    system = scooter(scenario_factory, simulation_config, Countermeasure.C1)

    assert system.stock_bctrl_image().encrypted

    with pytest.raises(StockFirmwareEncryptedError):
        craft_attack_image(system, Attack.UBR, bytes(16))


def test_patched_image_keeps_a_stale_signature(scenario_factory, simulation_config: SimulationConfig):
    system = scooter(scenario_factory, simulation_config, Countermeasure.C2)
    stock = system.stock_bctrl_image()
    image = craft_attack_image(system, Attack.UTI, bytes(16))
    rule = system.policy.rule(Profile.M365, FirmwareTarget.BCTRL)

    assert image.signature == stock.signature
    assert verify_and_install(stock, rule, system.keys).accepted
    assert verify_and_install(image, rule, system.keys).reason is RejectReason.SIGNATURE_INVALID


# Résultats


def test_outcome_json_and_failure_labels():
    outcome = ScenarioOutcome(
        attack=Attack.PLR,
        profile=Profile.ES3,
        countermeasures=frozenset({Countermeasure.C3, Countermeasure.C1}),
        seed=7,
        label=OutcomeLabel.ATTACK_FAILED,
        failure_reason=install_rejected("SignatureInvalid"),
        metrics={"recoveredPin": None},
    )

    assert not outcome.success
    assert outcome.to_json() == {
        "attack": "plr",
        "profile": "es3",
        "countermeasures": "c1+c3",
        "seed": 7,
        "success": False,
        "label": "attack-failed",
        "failureReason": "InstallRejected:SignatureInvalid",
        "metrics": {"recoveredPin": None},
    }
    assert step_failed("read-hash") == "StepFailed:read-hash"
