"""
Exceptions spécifiques au contrôleur de batterie.

Ce module contient les exceptions levées par les primitives du micrologiciel BCTRL.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class CapabilityUnavailableError(Exception):
    """
    Exception levée lorsqu'une primitive exige une capacité absente du micrologiciel installé.

    :param capability: La capacité requise.
    :type capability: str
    :param operation: L'opération demandée.
    :type operation: str
    """

    capability: str
    """La capacité requise."""
    operation: str
    """L'opération demandée."""

    def __str__(self) -> str:
        return f"L'opération '{self.operation}' exige la capacité {self.capability}, absente du micrologiciel."


@dataclass(frozen=True)
class BmonUnreachableError(Exception):
    """
    Exception levée lorsque le BMON ne répond pas sur le bus I2C (mode SHIP).

    :param step: L'étape interrompue.
    :type step: str
    """

    step: str
    """L'étape interrompue."""

    def __str__(self) -> str:
        return f"Le BMON ne répond pas pendant l'étape '{self.step}'."


@dataclass(frozen=True)
class FirmwareBodyError(Exception):
    """
    Exception levée lorsqu'un corps de micrologiciel BCTRL installé est illisible.

    :param reason: La description du défaut.
    :type reason: str
    """

    reason: str
    """La description du défaut."""

    def __str__(self) -> str:
        return f"Corps de micrologiciel BCTRL illisible : {self.reason}."
