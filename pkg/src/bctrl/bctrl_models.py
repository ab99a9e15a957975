"""
Module des modèles du contrôleur de batterie.

Ce module contient les capacités malveillantes et leur ensemble (PatchSet), le descripteur du
micrologiciel BCTRL et le codec de son corps, le résumé des cellules et l'évaluation des branches de
la boucle principale.
"""

import hashlib
import struct
from dataclasses import dataclass, field
from enum import IntEnum, StrEnum
from typing import Optional, Sequence

from battery import Thresholds

from .exception_bctrl import FirmwareBodyError

BODY_MAGIC: bytes = b"BCFW"
BODY_HEADER_FORMAT: str = ">4sHHHBHB16sB14s"
BODY_HEADER_SIZE: int = struct.calcsize(BODY_HEADER_FORMAT)
CODE_SIZE: int = 512
UNLOCK_CODE_SIZE: int = 16
MAX_NAME_SIZE: int = 14
SERIAL_SIZE: int = 14


class Capability(StrEnum):
    """
    Capacités qu'une image BCTRL malveillante peut ajouter.
    """

    DFU = "DFU"
    """Bloque les mises à jour tant que le code de déverrouillage n'est pas reçu."""
    MUB = "MUB"
    """Envoie des trames UART arbitraires en usurpant l'émetteur."""
    MIB = "MIB"
    """Envoie des messages I2C arbitraires au BMON."""
    DDT = "DDT"
    """Programme les seuils matériels du BMON à leurs valeurs extrêmes."""
    DCT = "DCT"
    """Désactive les vérifications logicielles de sous-tension et de surtension."""
    DLB = "DLB"
    """Désactive l'équilibrage des cellules."""
    DBC = "DBC"
    """Désactive la charge de la batterie."""
    FBD = "FBD"
    """Force la décharge rapide : aucune mise en veille, charge maximale."""
    CBA = "CBA"
    """Modifie le nom BLE annoncé par le BTS."""
    SCV = "SCV"
    """Falsifie la tension rapportée d'un groupe."""


CAPABILITY_ORDER: tuple[Capability, ...] = tuple(Capability)


@dataclass(frozen=True)
class DdtThresholds:
    """
    Seuils matériels programmés par DDT.
    """

    uv_trip: int = 1580
    """Le seuil de sous-tension du BMON."""
    ov_trip: int = 4700
    """Le seuil de surtension du BMON."""


@dataclass(frozen=True)
class ScvSpoof:
    """
    Falsification de la tension rapportée par SCV.
    """

    group_index: int
    """Le numéro du groupe falsifié (1 à 10)."""
    spoofed_mv: int
    """La tension rapportée."""

    def __post_init__(self) -> None:
        if not 1 <= self.group_index <= 10:
            raise ValueError("Le groupe falsifié doit être compris entre 1 et 10.")


@dataclass(frozen=True)
class PatchSet:
    """
    Ensemble des modifications d'un micrologiciel BCTRL. Un ensemble vide correspond au micrologiciel
    d'origine.
    """

    dfu: bool = False
    mub: bool = False
    mib: bool = False
    dct: bool = False
    dlb: bool = False
    dbc: bool = False
    fbd: bool = False
    cba: bool = False
    scv: bool = False
    ddt: Optional[DdtThresholds] = None
    """Les seuils DDT, None si DDT est absent."""
    scv_spoof: Optional[ScvSpoof] = None
    """La falsification SCV, None si SCV est absent."""

    def __post_init__(self) -> None:
        if self.scv and self.scv_spoof is None:
            raise ValueError("SCV exige un groupe et une tension falsifiés.")

    def has(self, capability: Capability) -> bool:
        if capability == Capability.DDT:
            return self.ddt is not None

        return getattr(self, capability.value.lower())

    @property
    def capabilities(self) -> frozenset[Capability]:
        return frozenset(capability for capability in Capability if self.has(capability))

    @property
    def is_stock(self) -> bool:
        return not self.capabilities

    @classmethod
    def from_capabilities(
        cls,
        capabilities: frozenset[Capability] | set[Capability],
        ddt: Optional[DdtThresholds] = None,
        scv_spoof: Optional[ScvSpoof] = None,
    ) -> "PatchSet":
        """
        Construit un ensemble à partir d'une liste de capacités.

        :param capabilities: Les capacités.
        :type capabilities: frozenset[Capability] | set[Capability]
        :param ddt: Les seuils DDT (valeurs extrêmes par défaut).
        :type ddt: Optional[DdtThresholds]
        :param scv_spoof: La falsification SCV (groupe 1 à 3700 mV par défaut).
        :type scv_spoof: Optional[ScvSpoof]
        :return: L'ensemble.
        :rtype: PatchSet
        """
        flags = {
            capability.value.lower(): True for capability in capabilities if capability != Capability.DDT
        }

        return cls(
            **flags,
            ddt=(ddt or DdtThresholds()) if Capability.DDT in capabilities else None,
            scv_spoof=(scv_spoof or ScvSpoof(group_index=1, spoofed_mv=3700))
            if Capability.SCV in capabilities
            else None,
        )

    def to_bits(self) -> int:
        return sum(1 << position for position, capability in enumerate(CAPABILITY_ORDER) if self.has(capability))


STOCK_PATCH_SET: PatchSet = PatchSet()


class PayloadKind(IntEnum):
    """
    Programme malveillant embarqué dans une image BCTRL.
    """

    NONE = 0
    UBR = 1
    UTI = 2
    DES1 = 3
    DES2 = 4
    DES3 = 5
    DES4 = 6
    DES5 = 7
    DES6 = 8
    DES7 = 9
    PLR = 10


@dataclass(frozen=True)
class BctrlFirmware:
    """
    Descripteur du micrologiciel BCTRL porté par le corps d'une image.
    """

    version: str
    """La version du micrologiciel."""
    patch_set: PatchSet = STOCK_PATCH_SET
    """Les modifications actives."""
    payload: PayloadKind = PayloadKind.NONE
    """Le programme malveillant."""
    unlock_code: bytes = bytes(UNLOCK_CODE_SIZE)
    """Le code de déverrouillage des mises à jour (DFU)."""
    ransom_url: bytes = b""
    """Le lien de rançon annoncé (UBR)."""
    code: bytes = field(default=b"", repr=False)
    """Le code machine opaque du micrologiciel."""

    def __post_init__(self) -> None:
        if len(self.unlock_code) != UNLOCK_CODE_SIZE:
            raise ValueError("Le code de déverrouillage doit contenir 16 octets.")
        if len(self.ransom_url) > MAX_NAME_SIZE:
            raise ValueError("Le lien de rançon doit tenir dans le nom BLE (14 octets).")

    @property
    def malicious(self) -> bool:
        return not self.patch_set.is_stock or self.payload != PayloadKind.NONE


def stock_code(version: str) -> bytes:
    """
    Retourne le code machine opaque d'une version d'origine.

    :param version: La version.
    :type version: str
    :return: Le code (512 octets déterministes).
    :rtype: bytes
    """
    blocks = [hashlib.sha256(f"{version}:{index}".encode()).digest() for index in range(CODE_SIZE // 32)]

    return b"".join(blocks)


def encode_firmware_body(firmware: BctrlFirmware) -> bytes:
    """
    Encode le corps d'une image BCTRL.

    :param firmware: Le descripteur.
    :type firmware: BctrlFirmware
    :return: Le corps en clair.
    :rtype: bytes
    """
    patch_set = firmware.patch_set
    ddt = patch_set.ddt or DdtThresholds(uv_trip=0, ov_trip=0)
    scv = patch_set.scv_spoof
    header = struct.pack(
        BODY_HEADER_FORMAT,
        BODY_MAGIC,
        patch_set.to_bits(),
        ddt.uv_trip,
        ddt.ov_trip,
        scv.group_index if scv else 0,
        scv.spoofed_mv if scv else 0,
        int(firmware.payload),
        firmware.unlock_code,
        len(firmware.ransom_url),
        firmware.ransom_url.ljust(MAX_NAME_SIZE, b"\x00"),
    )

    return header + (firmware.code or stock_code(firmware.version))


def decode_firmware_body(version: str, body: bytes) -> BctrlFirmware:
    """
    Décode le corps d'une image BCTRL.

    :param version: La version portée par l'en-tête de l'image.
    :type version: str
    :param body: Le corps en clair.
    :type body: bytes
    :return: Le descripteur.
    :rtype: BctrlFirmware
    :raises FirmwareBodyError: Si le corps est tronqué ou si son magic est invalide.
    """
    if len(body) < BODY_HEADER_SIZE:
        raise FirmwareBodyError(reason=f"{len(body)} octets, en-tête incomplet")

    magic, bits, uv_trip, ov_trip, scv_group, scv_mv, payload, unlock, url_len, url = struct.unpack(
        BODY_HEADER_FORMAT, body[:BODY_HEADER_SIZE]
    )

    if magic != BODY_MAGIC:
        raise FirmwareBodyError(reason=f"magic {magic!r} inattendu")

    try:
        payload_kind = PayloadKind(payload)
    except ValueError as error:
        raise FirmwareBodyError(reason=f"programme {payload} inconnu") from error

    capabilities = {capability for position, capability in enumerate(CAPABILITY_ORDER) if bits >> position & 1}

    try:
        patch_set = PatchSet.from_capabilities(
            capabilities,
            ddt=DdtThresholds(uv_trip=uv_trip, ov_trip=ov_trip),
            scv_spoof=ScvSpoof(group_index=scv_group, spoofed_mv=scv_mv) if Capability.SCV in capabilities else None,
        )
    except ValueError as error:
        raise FirmwareBodyError(reason=str(error)) from error

    return BctrlFirmware(
        version=version,
        patch_set=patch_set,
        payload=payload_kind,
        unlock_code=unlock,
        ransom_url=url[: min(url_len, MAX_NAME_SIZE)],
        code=body[BODY_HEADER_SIZE:],
    )


@dataclass(frozen=True)
class CellSummary:
    """
    Résumé des tensions des groupes vivants (un groupe à 0 mV est considéré ouvert).
    """

    min_mv: int
    max_mv: int
    delta_mv: int
    batt_level: int
    live_groups: int

    @classmethod
    def from_voltages(cls, voltages: Sequence[int], batt_level: int) -> "CellSummary":
        live = [voltage for voltage in voltages if voltage > 0]

        if not live:
            return cls(min_mv=0, max_mv=0, delta_mv=0, batt_level=0, live_groups=0)

        return cls(
            min_mv=min(live),
            max_mv=max(live),
            delta_mv=max(live) - min(live),
            batt_level=batt_level,
            live_groups=len(live),
        )


@dataclass(frozen=True)
class MainLoopBranches:
    """
    Branches déclenchées par une itération de la boucle principale.
    """

    balance: bool = False
    """L'écart atteint cLBD et l'équilibrage est actif."""
    under_voltage: bool = False
    """La tension minimale est sous cUVT et la vérification est active."""
    over_voltage: bool = False
    """La tension maximale dépasse cOVT et la vérification est active."""

    @property
    def sleep(self) -> bool:
        return self.balance or self.under_voltage or self.over_voltage

    @property
    def protect(self) -> bool:
        """Indique une branche de protection qui coupe le BTS et le DRV."""
        return self.under_voltage or self.over_voltage


def evaluate_branches(summary: CellSummary, thresholds: Thresholds, patch_set: PatchSet) -> MainLoopBranches:
    """
    Évalue les branches de la boucle principale pour un résumé de cellules.

    :param summary: Le résumé des groupes vivants.
    :type summary: CellSummary
    :param thresholds: Les seuils logiciels.
    :type thresholds: Thresholds
    :param patch_set: Les modifications actives.
    :type patch_set: PatchSet
    :return: Les branches déclenchées.
    :rtype: MainLoopBranches
    """
    if summary.live_groups == 0:
        return MainLoopBranches()

    return MainLoopBranches(
        balance=summary.delta_mv >= thresholds.c_lbd and not patch_set.dlb,
        under_voltage=summary.min_mv < thresholds.c_uvt and not patch_set.dct,
        over_voltage=summary.max_mv > thresholds.c_ovt and not patch_set.dct,
    )


@dataclass
class BctrlState:
    """
    État d'exécution du BCTRL.
    """

    serial: bytes
    """Le numéro de série du BCTRL (14 octets)."""
    firmware: BctrlFirmware
    """Le micrologiciel installé."""
    thresholds: Thresholds = field(default_factory=Thresholds)
    """Les seuils logiciels."""
    can_charge: bool = True
    """L'indicateur de charge autorisée."""
    sleep_mode: bool = False
    """L'indicateur de veille."""
    can_fw_update: bool = True
    """L'indicateur de mise à jour autorisée."""
    allow_charge_below_cuvt: bool = False
    """Le micrologiciel installé est une image de récupération."""
    booted: bool = False
    """Le micrologiciel a terminé son initialisation."""

    @property
    def fwver(self) -> str:
        return self.firmware.version

    @property
    def patch_set(self) -> PatchSet:
        return self.firmware.patch_set

    @property
    def unlock_code(self) -> bytes:
        return self.firmware.unlock_code

