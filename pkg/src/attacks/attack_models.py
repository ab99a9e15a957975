"""
Module des modèles des attaques.

Ce module contient la configuration du rançongiciel, le message de pistage (Track), les fragments de
l'empreinte du mot de passe et le résultat d'un scénario.
"""

from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any, Callable, Optional

from battery import Thresholds
from bctrl import CellSummary
from config import Attack, Countermeasure, Profile, UbrSettings, format_countermeasures

TRACK_SIZE: int = 14
FINGERPRINT_SIZE: int = 8
TRACK_RESERVED_SIZE: int = 3
HASH_SIZE: int = 32
FRAGMENT_DATA_SIZE: int = 13
FRAGMENT_COUNT: int = 3

RevealCondition = Callable[[CellSummary, Thresholds], bool]
"""Prédicat de révélation de la rançon, évalué sur le résumé des groupes vivants."""


def any_cell_below_cuvt(summary: CellSummary, thresholds: Thresholds) -> bool:
    """
    Condition de révélation par défaut : un groupe vivant est passé sous cUVT.

    :param summary: Le résumé des groupes vivants.
    :type summary: CellSummary
    :param thresholds: Les seuils logiciels.
    :type thresholds: Thresholds
    :return: Vrai si la rançon doit être révélée.
    :rtype: bool
    """
    return summary.live_groups > 0 and summary.min_mv < thresholds.c_uvt


@dataclass(frozen=True)
class UbrConfig:
    """
    Configuration du rançongiciel UBR.
    """

    ransom_url: bytes
    """Le lien raccourci annoncé en BLE (14 octets au plus)."""
    reveal_condition: RevealCondition = any_cell_below_cuvt
    """La condition qui déclenche l'annonce de la rançon."""

    def __post_init__(self) -> None:
        if len(self.ransom_url) > TRACK_SIZE:
            raise ValueError("Le lien de rançon doit tenir dans le nom BLE (14 octets).")

    @classmethod
    def from_settings(cls, settings: UbrSettings) -> "UbrConfig":
        return cls(ransom_url=settings.ransom_url.encode())

    def notify_user(self, summary: CellSummary, thresholds: Thresholds) -> bool:
        return self.reveal_condition(summary, thresholds)


@dataclass(frozen=True)
class TrackMessage:
    """
    Message de pistage de 14 octets publié comme nom BLE : empreinte, kilométrage, niveau de batterie
    et trois octets réservés.
    """

    fingerprint: bytes
    """Les 8 derniers octets du numéro de série DRV."""
    mileage: int
    """Le kilométrage en km."""
    batt_level: int
    """Le niveau de batterie en pourcentage."""
    reserved: bytes = bytes(TRACK_RESERVED_SIZE)
    """Les octets de bourrage (nuls)."""

    def __post_init__(self) -> None:
        if len(self.fingerprint) != FINGERPRINT_SIZE:
            raise ValueError("L'empreinte doit contenir 8 octets.")
        if not 0 <= self.mileage <= 0xFFFF:
            raise ValueError("Le kilométrage est codé sur 16 bits.")
        if not 0 <= self.batt_level <= 0xFF:
            raise ValueError("Le niveau de batterie est codé sur 8 bits.")
        if len(self.reserved) != TRACK_RESERVED_SIZE:
            raise ValueError("Le message Track réserve exactement 3 octets.")

    def to_bytes(self) -> bytes:
        return self.fingerprint + self.mileage.to_bytes(2, "big") + bytes([self.batt_level]) + self.reserved

    @classmethod
    def from_bytes(cls, data: bytes) -> "TrackMessage":
        """
        Décode un nom BLE de 14 octets.

        :param data: Le nom annoncé.
        :type data: bytes
        :return: Le message.
        :rtype: TrackMessage
        :raises ValueError: Si le nom n'a pas la taille d'un message Track.
        """
        if len(data) != TRACK_SIZE:
            raise ValueError(f"Un message Track contient {TRACK_SIZE} octets, {len(data)} reçus.")

        return cls(
            fingerprint=data[:FINGERPRINT_SIZE],
            mileage=int.from_bytes(data[FINGERPRINT_SIZE : FINGERPRINT_SIZE + 2], "big"),
            batt_level=data[FINGERPRINT_SIZE + 2],
            reserved=data[FINGERPRINT_SIZE + 3 :],
        )


@dataclass(frozen=True)
class HashFragments:
    """
    Découpage de l'empreinte SHA256 en trois noms BLE : un octet d'indice suivi de 13, 13 puis 6 octets.
    """

    fragments: tuple[bytes, ...]
    """Les noms annoncés, dans l'ordre de rotation."""

    def __post_init__(self) -> None:
        if len(self.fragments) != FRAGMENT_COUNT:
            raise ValueError("L'empreinte est exfiltrée en exactement trois fragments.")

    @classmethod
    def split(cls, digest: bytes) -> "HashFragments":
        if len(digest) != HASH_SIZE:
            raise ValueError("L'empreinte SHA256 contient 32 octets.")

        return cls(
            fragments=tuple(
                bytes([index]) + digest[index * FRAGMENT_DATA_SIZE : (index + 1) * FRAGMENT_DATA_SIZE]
                for index in range(FRAGMENT_COUNT)
            )
        )

    def join(self) -> bytes:
        return b"".join(fragment[1:] for fragment in sorted(self.fragments, key=lambda fragment: fragment[0]))


class OutcomeLabel(StrEnum):
    """
    Étiquette du résultat d'un scénario.
    """

    SUCCESS = "success"
    SUCCESS_WITH_E24 = "success-with-E24"
    """UBR réussi sur un DRV qui a levé l'erreur 24 pendant l'attaque."""
    ATTACK_FAILED = "attack-failed"
    BASELINE = "baseline"
    """Scénario de référence sans attaque."""


FIRMWARE_ENCRYPTED: str = "FirmwareEncrypted"
OBSERVABLE_NOT_REACHED: str = "ObservableNotReached"


def install_rejected(reason: str) -> str:
    return f"InstallRejected:{reason}"


def step_failed(step: str) -> str:
    return f"StepFailed:{step}"


@dataclass(frozen=True)
class ScenarioOutcome:
    """
    Résultat d'un scénario.
    """

    attack: Attack
    profile: Profile
    countermeasures: frozenset[Countermeasure]
    seed: int
    label: OutcomeLabel
    """L'étiquette du résultat."""
    failure_reason: Optional[str] = None
    """La cause de l'échec, None en cas de succès."""
    metrics: dict[str, Any] = field(default_factory=dict)
    """Les métriques du scénario."""

    @property
    def success(self) -> bool:
        return self.label in (OutcomeLabel.SUCCESS, OutcomeLabel.SUCCESS_WITH_E24)

    def to_json(self) -> dict[str, Any]:
        """
        Retourne la représentation du fichier outcome.json.

        :return: Le dictionnaire sérialisable.
        :rtype: dict[str, Any]
        """
        return {
            "attack": str(self.attack),
            "profile": str(self.profile),
            "countermeasures": format_countermeasures(self.countermeasures),
            "seed": self.seed,
            "success": self.success,
            "label": str(self.label),
            "failureReason": self.failure_reason,
            "metrics": self.metrics,
        }
