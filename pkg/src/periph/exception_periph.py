"""
Exceptions spécifiques aux périphériques.

Ce module contient les exceptions levées par le BTS et le DRV.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class UnknownFieldError(Exception):
    """
    Exception levée lorsqu'une lecture vise un champ que le DRV ne possède pas.

    :param command: La commande reçue.
    :type command: int
    """

    command: int
    """La commande reçue."""

    def __str__(self) -> str:
        return f"Le DRV ne possède aucun champ associé à la commande 0x{self.command:02X}."
