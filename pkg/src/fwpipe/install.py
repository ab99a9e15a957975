"""
Module de vérification et d'installation des images.

Ce module contient la décision d'installation d'une image reçue : chiffrement exigé, déchiffrement,
contrôle du CRC, vérification de la signature, puis verrouillage sous cUVT des images BCTRL qui ne sont
pas des images de récupération.
"""

from dataclasses import dataclass
from enum import StrEnum
from typing import Optional

from loguru import logger

from .exception_fwpipe import DecryptFailedError
from .image import FirmwareImage, FirmwareTarget, compute_body_crc
from .keys import KeyMaterial
from .policy import PolicyRule
from .signing import ecdsa_verify
from .tea import tea_decrypt

LOGGER = logger.bind(name="BES-Simulation.Fwpipe.Install")


class RejectReason(StrEnum):
    """
    Motifs de refus d'une installation.
    """

    ENCRYPTION_REQUIRED = "EncryptionRequired"
    DECRYPT_FAILED = "DecryptFailed"
    CRC_MISMATCH = "CrcMismatch"
    SIGNATURE_MISSING = "SignatureMissing"
    SIGNATURE_INVALID = "SignatureInvalid"
    UNDERVOLT_LOCKOUT = "UndervoltLockout"
    WRONG_TARGET = "WrongTarget"
    CORRUPT_BODY = "CorruptBody"


@dataclass(frozen=True)
class InstallDecision:
    """
    Résultat de la vérification d'une image.
    """

    accepted: bool
    """Indique si l'image est installée."""
    reason: Optional[RejectReason] = None
    """Le motif du refus."""
    body: Optional[bytes] = None
    """Le corps en clair installé."""

    @classmethod
    def reject(cls, reason: RejectReason) -> "InstallDecision":
        return cls(accepted=False, reason=reason)


def decrypt_body(image: FirmwareImage, keys: KeyMaterial) -> bytes:
    """
    Retourne le corps en clair d'une image.

    :param image: L'image.
    :type image: FirmwareImage
    :param keys: Les clés du nœud.
    :type keys: KeyMaterial
    :return: Le corps en clair.
    :rtype: bytes
    :raises DecryptFailedError: Si le corps n'est pas déchiffrable ou si la clé est absente.
    """
    if not image.encrypted:
        return image.body

    key = keys.tea_key(image.target)

    if key is None:
        raise DecryptFailedError(length=len(image.body))

    return tea_decrypt(key, image.body)


def verify_and_install(
    image: FirmwareImage,
    rule: PolicyRule,
    keys: KeyMaterial,
    min_live_cell_mv: Optional[float] = None,
    c_uvt_mv: Optional[int] = None,
    expected_target: Optional[FirmwareTarget] = None,
) -> InstallDecision:
    """
    Vérifie une image selon la règle de sa cible : déchiffrement, CRC, puis signature. Une image BCTRL
    ordinaire est refusée tant qu'un groupe vivant est sous cUVT.

    :param image: L'image reçue.
    :type image: FirmwareImage
    :param rule: La règle effective de la cible.
    :type rule: PolicyRule
    :param keys: Les clés du nœud cible.
    :type keys: KeyMaterial
    :param min_live_cell_mv: La tension minimale des groupes vivants (BCTRL seulement).
    :type min_live_cell_mv: Optional[float]
    :param c_uvt_mv: Le seuil critique de sous-tension (BCTRL seulement).
    :type c_uvt_mv: Optional[int]
    :param expected_target: La cible du nœud qui installe.
    :type expected_target: Optional[FirmwareTarget]
    :return: La décision.
    :rtype: InstallDecision
    """
    if expected_target is not None and image.target != expected_target:
        return InstallDecision.reject(RejectReason.WRONG_TARGET)

    if rule.require_encryption and not image.encrypted:
        return InstallDecision.reject(RejectReason.ENCRYPTION_REQUIRED)

    try:
        body = decrypt_body(image, keys)
    except DecryptFailedError as error:
        LOGGER.warning(str(error))
        return InstallDecision.reject(RejectReason.DECRYPT_FAILED)

    if compute_body_crc(body) != image.body_crc:
        return InstallDecision.reject(RejectReason.CRC_MISMATCH)

    if rule.require_signature:
        if not image.signature:
            return InstallDecision.reject(RejectReason.SIGNATURE_MISSING)

        if not ecdsa_verify(keys.public_key, image.target, image.version, body, image.signature):
            return InstallDecision.reject(RejectReason.SIGNATURE_INVALID)

    if (
        image.target == FirmwareTarget.BCTRL
        and not image.allow_charge_below_cuvt
        and min_live_cell_mv is not None
        and c_uvt_mv is not None
        and min_live_cell_mv < c_uvt_mv
    ):
        return InstallDecision.reject(RejectReason.UNDERVOLT_LOCKOUT)

    return InstallDecision(accepted=True, body=body)
