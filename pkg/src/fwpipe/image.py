"""
Module des images de micrologiciel.

Ce module contient l'image de micrologiciel et son format de fichier :

``en-tête >4sB16sBIHH {magic "BESI", cible, version, indicateurs, longueur du corps, CRC du corps,
longueur de la signature}`` suivi du corps (chiffré si l'indicateur l'exige) puis de la signature DER.

Le CRC (CRC-16/CCITT) et la signature portent sur le corps en clair.
"""

import binascii
import hashlib
import struct
from dataclasses import dataclass, replace
from enum import IntEnum, IntFlag
from pathlib import Path
from typing import Optional

from loguru import logger

from .exception_fwpipe import ImageFormatError

LOGGER = logger.bind(name="BES-Simulation.Fwpipe.Image")

MAGIC: bytes = b"BESI"
HEADER_FORMAT: str = ">4sB16sBIHH"
HEADER_SIZE: int = struct.calcsize(HEADER_FORMAT)
VERSION_SIZE: int = 16


class FirmwareTarget(IntEnum):
    """
    Nœud destinataire d'une image.
    """

    BTS = 1
    DRV = 2
    BCTRL = 3


class ImageFlags(IntFlag):
    """
    Indicateurs de l'en-tête d'image.
    """

    NONE = 0
    ENCRYPTED = 0x01
    """Le corps est chiffré par TEA."""
    RECOVERY = 0x02
    """Image de récupération : autorise la charge sous cUVT."""


def compute_body_crc(body: bytes) -> int:
    """
    Calcule le CRC-16/CCITT d'un corps en clair.

    :param body: Le corps.
    :type body: bytes
    :return: Le CRC sur 16 bits.
    :rtype: int
    """
    return binascii.crc_hqx(body, 0xFFFF)


def parse_version(version: str) -> tuple[int, ...]:
    """
    Convertit une version pointée en tuple comparable.

    :param version: La version (ex. '1.5.2').
    :type version: str
    :return: Les composantes numériques.
    :rtype: tuple[int, ...]
    :raises ValueError: Si une composante n'est pas numérique.
    """
    return tuple(int(part) for part in version.strip().split("."))


@dataclass(frozen=True)
class FirmwareImage:
    """
    Image de micrologiciel telle que transportée jusqu'au nœud cible.
    """

    target: FirmwareTarget
    """Le nœud cible."""
    version: str
    """La version."""
    body: bytes
    """Le corps tel que stocké dans l'image (chiffré si ``encrypted``)."""
    body_crc: int
    """Le CRC du corps en clair."""
    encrypted: bool = False
    """Indique si le corps est chiffré."""
    signature: Optional[bytes] = None
    """La signature ECDSA du corps en clair."""
    allow_charge_below_cuvt: bool = False
    """Indique une image de récupération."""

    def __post_init__(self) -> None:
        if len(self.version.encode("ascii")) > VERSION_SIZE:
            raise ValueError("La version d'une image est limitée à 16 caractères ASCII.")

    @property
    def flags(self) -> ImageFlags:
        flags = ImageFlags.NONE

        if self.encrypted:
            flags |= ImageFlags.ENCRYPTED
        if self.allow_charge_below_cuvt:
            flags |= ImageFlags.RECOVERY

        return flags

    @property
    def digest(self) -> str:
        """Empreinte courte du corps tel que transmis (SHA-256 tronqué)."""
        return hashlib.sha256(self.body).hexdigest()[:16]

    @classmethod
    def plain(
        cls, target: FirmwareTarget, version: str, body: bytes, allow_charge_below_cuvt: bool = False
    ) -> "FirmwareImage":
        """
        Construit une image en clair, non signée.

        :param target: Le nœud cible.
        :type target: FirmwareTarget
        :param version: La version.
        :type version: str
        :param body: Le corps.
        :type body: bytes
        :param allow_charge_below_cuvt: Indique une image de récupération.
        :type allow_charge_below_cuvt: bool
        :return: L'image.
        :rtype: FirmwareImage
        """
        return cls(
            target=target,
            version=version,
            body=body,
            body_crc=compute_body_crc(body),
            allow_charge_below_cuvt=allow_charge_below_cuvt,
        )

    def with_body(self, body: bytes) -> "FirmwareImage":
        """Retourne une copie dont le corps en clair est remplacé et le CRC recalculé."""
        return replace(self, body=body, body_crc=compute_body_crc(body), encrypted=False, signature=None)

    def to_bytes(self) -> bytes:
        """
        Sérialise l'image au format de fichier.

        :return: Les octets du fichier.
        :rtype: bytes
        """
        signature = self.signature or b""
        header = struct.pack(
            HEADER_FORMAT,
            MAGIC,
            int(self.target),
            self.version.encode("ascii").ljust(VERSION_SIZE, b"\x00"),
            int(self.flags),
            len(self.body),
            self.body_crc,
            len(signature),
        )

        return header + self.body + signature

    @classmethod
    def from_bytes(cls, data: bytes) -> "FirmwareImage":
        """
        Désérialise une image.

        :param data: Les octets du fichier.
        :type data: bytes
        :return: L'image.
        :rtype: FirmwareImage
        :raises ImageFormatError: Si le fichier est tronqué, si le magic ou la cible sont invalides.
        """
        if len(data) < HEADER_SIZE:
            raise ImageFormatError(reason=f"en-tête tronqué ({len(data)} octets)")

        magic, target, version, flags, body_len, body_crc, sig_len = struct.unpack(
            HEADER_FORMAT, data[:HEADER_SIZE]
        )

        if magic != MAGIC:
            raise ImageFormatError(reason=f"magic {magic!r} inattendu")

        try:
            firmware_target = FirmwareTarget(target)
        except ValueError as error:
            raise ImageFormatError(reason=f"cible {target} inconnue") from error

        if len(data) != HEADER_SIZE + body_len + sig_len:
            raise ImageFormatError(
                reason=f"longueur {len(data)} incohérente avec l'en-tête ({HEADER_SIZE + body_len + sig_len})"
            )

        try:
            version_text = version.rstrip(b"\x00").decode("ascii")
        except UnicodeDecodeError as error:
            raise ImageFormatError(reason="version non ASCII") from error

        body = data[HEADER_SIZE : HEADER_SIZE + body_len]
        signature = data[HEADER_SIZE + body_len :]

        return cls(
            target=firmware_target,
            version=version_text,
            body=body,
            body_crc=body_crc,
            encrypted=bool(flags & ImageFlags.ENCRYPTED),
            signature=signature or None,
            allow_charge_below_cuvt=bool(flags & ImageFlags.RECOVERY),
        )


def read_image(path: Path) -> FirmwareImage:
    """
    Lit un fichier d'image.

    :param path: Le chemin du fichier.
    :type path: Path
    :return: L'image.
    :rtype: FirmwareImage
    :raises ImageFormatError: Si le fichier est mal formé.
    """
    LOGGER.debug(f"Lecture de l'image de micrologiciel : '{path}'.")

    return FirmwareImage.from_bytes(path.read_bytes())


def write_image(image: FirmwareImage, path: Path) -> Path:
    """
    Écrit un fichier d'image.

    :param image: L'image.
    :type image: FirmwareImage
    :param path: Le chemin du fichier.
    :type path: Path
    :return: Le chemin du fichier écrit.
    :rtype: Path
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(image.to_bytes())
    LOGGER.info(f"Image {image.target.name} {image.version} écrite : '{path}'.")

    return path
