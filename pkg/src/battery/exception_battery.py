"""
Exceptions spécifiques au modèle de batterie et au moniteur BMON.

Ce module contient les exceptions levées par le point d'accès I2C du BMON.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class I2cTimeoutError(Exception):
    """
    Exception levée lorsqu'un accès I2C reste sans réponse (BMON en mode SHIP).

    :param reg_addr: L'adresse du registre visé.
    :type reg_addr: int
    """

    reg_addr: int
    """L'adresse du registre visé."""

    def __str__(self) -> str:
        return f"Aucune réponse du BMON pour le registre 0x{self.reg_addr:02X} (mode SHIP)."


@dataclass(frozen=True)
class UnknownRegisterError(Exception):
    """
    Exception levée lorsqu'un registre inexistant est adressé.

    :param reg_addr: L'adresse du registre.
    :type reg_addr: int
    """

    reg_addr: int
    """L'adresse du registre."""

    def __str__(self) -> str:
        return f"Le registre 0x{self.reg_addr:02X} n'existe pas dans le BMON."
