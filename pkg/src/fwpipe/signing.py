"""
Module de signature des micrologiciels.

Ce module contient la signature ECDSA P-256/SHA-256 (déterministe) d'une image et sa vérification. Le
message signé est ``cible ‖ version (16 octets) ‖ corps en clair``.
"""

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.asymmetric import ec

from .image import FirmwareTarget, VERSION_SIZE


def signed_message(target: FirmwareTarget, version: str, body: bytes) -> bytes:
    """
    Construit le message couvert par la signature.

    :param target: La cible.
    :type target: FirmwareTarget
    :param version: La version.
    :type version: str
    :param body: Le corps en clair.
    :type body: bytes
    :return: Le message.
    :rtype: bytes
    """
    return bytes([int(target)]) + version.encode("ascii").ljust(VERSION_SIZE, b"\x00") + body


def ecdsa_sign(private_key: ec.EllipticCurvePrivateKey, target: FirmwareTarget, version: str, body: bytes) -> bytes:
    """
    Signe une image.

    :param private_key: La clé privée du fabricant.
    :type private_key: ec.EllipticCurvePrivateKey
    :param target: La cible.
    :type target: FirmwareTarget
    :param version: La version.
    :type version: str
    :param body: Le corps en clair.
    :type body: bytes
    :return: La signature DER.
    :rtype: bytes
    """
    return private_key.sign(
        signed_message(target, version, body), ec.ECDSA(hashes.SHA256(), deterministic_signing=True)
    )


def ecdsa_verify(
    public_key: ec.EllipticCurvePublicKey, target: FirmwareTarget, version: str, body: bytes, signature: bytes
) -> bool:
    """
    Vérifie une signature. Une signature mal formée est simplement invalide.

    :param public_key: La clé publique du fabricant.
    :type public_key: ec.EllipticCurvePublicKey
    :param target: La cible.
    :type target: FirmwareTarget
    :param version: La version.
    :type version: str
    :param body: Le corps en clair.
    :type body: bytes
    :param signature: La signature DER.
    :type signature: bytes
    :return: Vrai si la signature est valide.
    :rtype: bool
    """
    try:
        public_key.verify(signature, signed_message(target, version, body), ec.ECDSA(hashes.SHA256()))
    except (InvalidSignature, ValueError):
        return False

    return True
