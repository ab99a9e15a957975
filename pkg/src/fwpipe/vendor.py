"""
Module des publications du fabricant.

Ce module contient la construction des images officielles : signature du corps en clair puis
chiffrement, selon la règle de la cible.
"""

from dataclasses import replace

from loguru import logger

from .image import FirmwareImage, FirmwareTarget
from .keys import KeyMaterial
from .policy import PolicyRule
from .signing import ecdsa_sign
from .tea import tea_encrypt

LOGGER = logger.bind(name="BES-Simulation.Fwpipe.Vendor")


def seal_image(image: FirmwareImage, keys: KeyMaterial, sign: bool, encrypt: bool) -> FirmwareImage:
    """
    Signe puis chiffre une image en clair.

    :param image: L'image en clair.
    :type image: FirmwareImage
    :param keys: Les clés disponibles.
    :type keys: KeyMaterial
    :param sign: Indique s'il faut signer (clé privée requise).
    :type sign: bool
    :param encrypt: Indique s'il faut chiffrer (clé TEA de la cible requise).
    :type encrypt: bool
    :return: L'image scellée.
    :rtype: FirmwareImage
    :raises ValueError: Si la clé nécessaire est absente.
    """
    sealed = image

    if sign:
        if keys.private_key is None:
            raise ValueError("La signature d'une image exige la clé privée du fabricant.")

        sealed = replace(sealed, signature=ecdsa_sign(keys.private_key, image.target, image.version, image.body))

    if encrypt:
        key = keys.tea_key(image.target)

        if key is None:
            raise ValueError(f"Aucune clé TEA disponible pour la cible {image.target.name}.")

        sealed = replace(sealed, body=tea_encrypt(key, image.body), encrypted=True)

    return sealed


def release_image(
    target: FirmwareTarget,
    version: str,
    body: bytes,
    keys: KeyMaterial,
    rule: PolicyRule,
    allow_charge_below_cuvt: bool = False,
) -> FirmwareImage:
    """
    Publie une image officielle conforme à la règle de sa cible. Le fabricant signe toujours ses images
    lorsque la cible vérifie les signatures et les chiffre lorsqu'elle exige le chiffrement.

    :param target: La cible.
    :type target: FirmwareTarget
    :param version: La version.
    :type version: str
    :param body: Le corps en clair.
    :type body: bytes
    :param keys: Les clés du fabricant.
    :type keys: KeyMaterial
    :param rule: La règle de la cible.
    :type rule: PolicyRule
    :param allow_charge_below_cuvt: Indique une image de récupération.
    :type allow_charge_below_cuvt: bool
    :return: L'image publiée.
    :rtype: FirmwareImage
    """
    image = FirmwareImage.plain(target, version, body, allow_charge_below_cuvt=allow_charge_below_cuvt)
    LOGGER.debug(f"Publication de l'image {target.name} {version} ({len(body)} octets).")

    return seal_image(image, keys, sign=rule.require_signature, encrypt=rule.require_encryption)
