"""
Tests de la chaîne des micrologiciels : TEA, ECDSA, format d'image, politique de signature et décision
d'installation.
"""

from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from config import Countermeasure, Profile
from fwpipe import (
    FirmwareImage,
    FirmwareTarget,
    ImageFormatError,
    KeyMaterial,
    PolicyRule,
    RejectReason,
    VULNERABLE_POLICY,
    build_signing_policy,
    ecdsa_sign,
    ecdsa_verify,
    generate_key_material,
    read_image,
    release_image,
    seal_image,
    tea_decrypt,
    tea_encrypt,
    verify_and_install,
    write_image,
)
from fwpipe.tea import encrypt_block
from simkern import RandomStreams

BODY = b"BCTRL firmware 1.2.1 main loop" * 4
SIGNED_AND_ENCRYPTED = PolicyRule(require_signature=True, require_encryption=True)


def test_tea_matches_the_reference_vector():
    assert encrypt_block(bytes(8), bytes(16)).hex() == "41ea3a0a94baa940"


def test_tea_round_trip_and_wrong_key(rng: np.random.Generator):
    for _ in range(1000):
        key, other = rng.bytes(16), rng.bytes(16)
        body = rng.bytes(int(rng.integers(1, 200)))
        encrypted = tea_encrypt(key, body)

        assert len(encrypted) % 8 == 0
        assert tea_decrypt(key, encrypted) == body
        assert tea_decrypt(other, encrypted) != body


def test_tea_rejects_bad_key_size():
    with pytest.raises(ValueError):
        tea_encrypt(bytes(15), b"abc")


def test_key_material_is_deterministic_per_seed(key_material: KeyMaterial):
    again = generate_key_material(RandomStreams(7))
    other = generate_key_material(RandomStreams(8))

    assert again.public_key.public_numbers() == key_material.public_key.public_numbers()
    assert again.tea_keys == key_material.tea_keys
    assert other.tea_keys != key_material.tea_keys


def test_attacker_only_knows_the_leaked_drv_key(key_material: KeyMaterial):
    attacker = key_material.attacker_view()

    assert attacker.tea_key(FirmwareTarget.DRV) == key_material.tea_key(FirmwareTarget.DRV)
    assert attacker.tea_key(FirmwareTarget.BCTRL) is None
    assert not attacker.can_sign
    assert key_material.can_sign


def test_signature_is_deterministic_and_verifies(key_material: KeyMaterial):
    first = ecdsa_sign(key_material.private_key, FirmwareTarget.BCTRL, "1.2.1", BODY)
    second = ecdsa_sign(key_material.private_key, FirmwareTarget.BCTRL, "1.2.1", BODY)

    assert first == second
    assert ecdsa_verify(key_material.public_key, FirmwareTarget.BCTRL, "1.2.1", BODY, first)
    assert not ecdsa_verify(key_material.public_key, FirmwareTarget.DRV, "1.2.1", BODY, first)
    assert not ecdsa_verify(key_material.public_key, FirmwareTarget.BCTRL, "1.2.2", BODY, first)


def test_any_body_bit_flip_breaks_the_signature(key_material: KeyMaterial, rng: np.random.Generator):
    signature = ecdsa_sign(key_material.private_key, FirmwareTarget.BCTRL, "1.2.1", BODY)

    for _ in range(1000):
        bit = int(rng.integers(0, len(BODY) * 8))
        mutated = bytearray(BODY)
        mutated[bit // 8] ^= 1 << (bit % 8)

        assert not ecdsa_verify(key_material.public_key, FirmwareTarget.BCTRL, "1.2.1", bytes(mutated), signature)


def test_any_signature_bit_flip_is_invalid(key_material: KeyMaterial):
    signature = ecdsa_sign(key_material.private_key, FirmwareTarget.BCTRL, "1.2.1", BODY)

    for bit in range(len(signature) * 8):
        mutated = bytearray(signature)
        mutated[bit // 8] ^= 1 << (bit % 8)

        assert not ecdsa_verify(key_material.public_key, FirmwareTarget.BCTRL, "1.2.1", BODY, bytes(mutated))


def test_image_file_round_trip(key_material: KeyMaterial, tmp_path: Path):
    image = release_image(
        FirmwareTarget.BCTRL, "1.2.1", BODY, key_material, SIGNED_AND_ENCRYPTED, allow_charge_below_cuvt=True
    )
    path = write_image(image, tmp_path / "images" / "bctrl.bin")

    assert path.exists()
    assert read_image(path) == image
    assert read_image(path).encrypted
    assert read_image(path).allow_charge_below_cuvt


@pytest.mark.parametrize(
    "mutate",
    [
        lambda data: data[:10],
        lambda data: b"XXXX" + data[4:],
        lambda data: data[:4] + b"\x09" + data[5:],
        lambda data: data + b"\x00",
    ],
    ids=["truncated-header", "bad-magic", "unknown-target", "length-mismatch"],
)
def test_malformed_image_files_are_refused(mutate):
    data = FirmwareImage.plain(FirmwareTarget.DRV, "1.5.5", BODY).to_bytes()

    with pytest.raises(ImageFormatError):
        FirmwareImage.from_bytes(mutate(data))


def test_image_version_is_limited():
    with pytest.raises(ValueError):
        FirmwareImage.plain(FirmwareTarget.BTS, "1." * 9, BODY)


def test_policy_without_countermeasures_is_the_vulnerable_one():
    policy = build_signing_policy(frozenset())

    assert policy.rules == VULNERABLE_POLICY
    assert policy.rule(Profile.ES3, FirmwareTarget.BCTRL) == PolicyRule()


def test_countermeasures_protect_the_battery_controller():
    policy = build_signing_policy(frozenset({Countermeasure.C1, Countermeasure.C2}))

    for profile in Profile:
        rule = policy.rule(profile, FirmwareTarget.BCTRL)
        assert rule.require_signature
        assert rule.require_encryption

    assert policy.rule(Profile.M365, FirmwareTarget.DRV) == PolicyRule()


def test_rule_applies_from_its_version():
    policy = build_signing_policy(frozenset())

    assert policy.effective(Profile.ES3, FirmwareTarget.DRV, "0.1.9").require_signature
    assert not policy.effective(Profile.ES3, FirmwareTarget.DRV, "0.1.6").require_signature
    assert not policy.effective(Profile.ES3, FirmwareTarget.BTS, "1.5.1").require_signature
    assert policy.effective(Profile.ES3, FirmwareTarget.BTS, "1.5.5").require_signature


def test_unprotected_target_installs_an_unsigned_image(key_material: KeyMaterial):
    image = FirmwareImage.plain(FirmwareTarget.BCTRL, "9.9.9", BODY)

    decision = verify_and_install(image, PolicyRule(), key_material)

    assert decision.accepted
    assert decision.body == BODY


def test_released_image_installs_under_full_protection(key_material: KeyMaterial):
    image = release_image(FirmwareTarget.BCTRL, "1.2.2", BODY, key_material, SIGNED_AND_ENCRYPTED)

    decision = verify_and_install(image, SIGNED_AND_ENCRYPTED, key_material, expected_target=FirmwareTarget.BCTRL)

    assert decision.accepted
    assert decision.body == BODY


def test_plain_image_is_refused_when_encryption_is_required(key_material: KeyMaterial):
    image = FirmwareImage.plain(FirmwareTarget.BCTRL, "1.2.2", BODY)

    decision = verify_and_install(image, PolicyRule(require_encryption=True), key_material)

    assert decision.reason is RejectReason.ENCRYPTION_REQUIRED


def test_image_encrypted_with_the_wrong_key_fails_its_crc(key_material: KeyMaterial):
    attacker = key_material.attacker_view()
    image = FirmwareImage.plain(FirmwareTarget.BCTRL, "1.2.2", BODY)
    forged = replace(image, body=tea_encrypt(attacker.tea_key(FirmwareTarget.DRV), BODY), encrypted=True)

    decision = verify_and_install(forged, PolicyRule(require_encryption=True), key_material)

    assert decision.reason is RejectReason.CRC_MISMATCH


def test_body_with_an_undecryptable_length_is_refused(key_material: KeyMaterial):
    image = replace(FirmwareImage.plain(FirmwareTarget.BCTRL, "1.2.2", BODY), body=b"short", encrypted=True)

    decision = verify_and_install(image, PolicyRule(require_encryption=True), key_material)

    assert decision.reason is RejectReason.DECRYPT_FAILED


def test_signature_checks(key_material: KeyMaterial):
    rule = PolicyRule(require_signature=True)
    unsigned = FirmwareImage.plain(FirmwareTarget.BCTRL, "1.2.2", BODY)
    stock = seal_image(unsigned, key_material, sign=True, encrypt=False)
    patched = replace(stock.with_body(BODY + b"\xee"), signature=stock.signature)
    foreign = generate_key_material(RandomStreams(99))
    forged = seal_image(unsigned, foreign, sign=True, encrypt=False)

    assert verify_and_install(unsigned, rule, key_material).reason is RejectReason.SIGNATURE_MISSING
    assert verify_and_install(patched, rule, key_material).reason is RejectReason.SIGNATURE_INVALID
    assert verify_and_install(forged, rule, key_material).reason is RejectReason.SIGNATURE_INVALID
    assert verify_and_install(stock, rule, key_material).accepted


def test_sealing_requires_the_matching_keys(key_material: KeyMaterial):
    image = FirmwareImage.plain(FirmwareTarget.BCTRL, "1.2.2", BODY)

    with pytest.raises(ValueError):
        seal_image(image, key_material.attacker_view(), sign=True, encrypt=False)

    with pytest.raises(ValueError):
        seal_image(image, key_material.attacker_view(), sign=False, encrypt=True)


def test_battery_controller_update_is_locked_below_cuvt(key_material: KeyMaterial):
    ordinary = FirmwareImage.plain(FirmwareTarget.BCTRL, "1.2.2", BODY)
    recovery = FirmwareImage.plain(FirmwareTarget.BCTRL, "1.2.2", BODY, allow_charge_below_cuvt=True)

    locked = verify_and_install(ordinary, PolicyRule(), key_material, min_live_cell_mv=1500.0, c_uvt_mv=1580)
    unlocked = verify_and_install(recovery, PolicyRule(), key_material, min_live_cell_mv=1500.0, c_uvt_mv=1580)
    healthy = verify_and_install(ordinary, PolicyRule(), key_material, min_live_cell_mv=3700.0, c_uvt_mv=1580)

    assert locked.reason is RejectReason.UNDERVOLT_LOCKOUT
    assert unlocked.accepted
    assert healthy.accepted


def test_image_for_another_node_is_refused(key_material: KeyMaterial):
    image = FirmwareImage.plain(FirmwareTarget.DRV, "1.5.5", BODY)

    decision = verify_and_install(image, PolicyRule(), key_material, expected_target=FirmwareTarget.BCTRL)

    assert decision.reason is RejectReason.WRONG_TARGET
