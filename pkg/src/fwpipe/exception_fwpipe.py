"""
Exceptions spécifiques à la chaîne de micrologiciels.

Ce module contient les exceptions du format d'image et du déchiffrement TEA.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class ImageFormatError(Exception):
    """
    Exception levée lorsqu'un fichier d'image est mal formé.

    :param reason: La description du défaut.
    :type reason: str
    """

    reason: str
    """La description du défaut."""

    def __str__(self) -> str:
        return f"Image de micrologiciel invalide : {self.reason}."


@dataclass(frozen=True)
class DecryptFailedError(Exception):
    """
    Exception levée lorsqu'un corps chiffré n'a pas une longueur déchiffrable.

    :param length: La longueur du corps chiffré.
    :type length: int
    """

    length: int
    """La longueur du corps chiffré."""

    def __str__(self) -> str:
        return (
            f"Impossible de déchiffrer un corps de {self.length} octets : "
            f"la longueur doit être un multiple de 8 non nul."
        )
