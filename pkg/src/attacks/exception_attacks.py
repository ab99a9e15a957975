"""
Exceptions spécifiques aux attaques.

Ce module contient les exceptions levées par les outils de l'attaquant et par le service de
déverrouillage.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class StockFirmwareEncryptedError(Exception):
    """
    Exception levée lorsque l'image d'origine est chiffrée avec une clé inconnue de l'attaquant : elle ne
    peut pas être modifiée.

    :param version: La version de l'image d'origine.
    :type version: str
    """

    version: str
    """La version de l'image d'origine."""

    def __str__(self) -> str:
        return f"L'image BCTRL {self.version} est chiffrée avec une clé inconnue : modification impossible."


@dataclass(frozen=True)
class ReassemblyError(Exception):
    """
    Exception levée lorsque les fragments observés ne permettent pas de reconstituer l'empreinte.

    :param missing: Les indices des fragments manquants.
    :type missing: list[int]
    """

    missing: list[int]
    """Les indices des fragments manquants."""

    def __str__(self) -> str:
        return f"Reconstitution impossible, fragments manquants : {self.missing}."


@dataclass(frozen=True)
class UnknownSerialError(Exception):
    """
    Exception levée lorsque le service de déverrouillage ne connaît pas un numéro de série.

    :param serial: Le numéro de série DRV.
    :type serial: bytes
    """

    serial: bytes
    """Le numéro de série DRV."""

    def __str__(self) -> str:
        return f"Numéro de série inconnu du service de déverrouillage : {self.serial!r}."


@dataclass(frozen=True)
class PaymentRequiredError(Exception):
    """
    Exception levée lorsqu'un code de déverrouillage est demandé avant le paiement.

    :param serial: Le numéro de série DRV.
    :type serial: bytes
    """

    serial: bytes
    """Le numéro de série DRV."""

    def __str__(self) -> str:
        return f"Le code de déverrouillage de {self.serial!r} n'est délivré qu'après paiement."


@dataclass(frozen=True)
class AttackStepError(Exception):
    """
    Exception levée lorsqu'une étape de l'attaque ne peut pas s'exécuter.

    :param step: L'étape.
    :type step: str
    :param reason: La cause.
    :type reason: str
    """

    step: str
    """L'étape."""
    reason: str
    """La cause."""

    def __str__(self) -> str:
        return f"L'étape '{self.step}' de l'attaque a échoué : {self.reason}."
