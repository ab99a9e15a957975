"""
Module du craquage hors ligne du mot de passe de l'application.

Ce module contient les NIP à six chiffres les plus courants (sept motifs, dix NIP chacun) et deux modes
de recherche sur l'empreinte SHA256 : énumération exhaustive des 10^6 candidats, motifs en premier, et
table précalculée des préfixes d'empreinte triés avec numpy.
"""

import hashlib
from functools import lru_cache
from itertools import chain
from typing import Iterator, Optional

import numpy as np
from loguru import logger

from .attack_models import HASH_SIZE

LOGGER = logger.bind(name="BES-Simulation.Attacks.PinCracker")

PIN_LENGTH: int = 6
PIN_SPACE: int = 10**PIN_LENGTH
PREFIX_SIZE: int = 8

PIN_PATTERNS: dict[str, tuple[str, ...]] = {
    "repeated-digit": tuple(str(digit) * PIN_LENGTH for digit in range(10)),
    "ascending-run": tuple(
        "".join(str((start + offset) % 10) for offset in range(PIN_LENGTH)) for start in range(10)
    ),
    "descending-run": tuple(
        "".join(str((start - offset) % 10) for offset in range(PIN_LENGTH)) for start in range(10)
    ),
    "repeated-pair": (
        "121212", "131313", "101010", "696969", "202020", "454545", "787878", "010101", "232323", "909090",
    ),
    "repeated-triple": (
        "123123", "012012", "147147", "258258", "369369", "321321", "654654", "987987", "159159", "753753",
    ),
    "date-ddmmyy": (
        "010190", "150385", "311299", "240702", "120588", "250612", "091174", "300466", "181001", "221295",
    ),
    "mirrored-half": (
        "123321", "456654", "789987", "012210", "147741", "258852", "369963", "159951", "753357", "246642",
    ),
}
"""Les sept motifs courants, dix NIP conformes chacun."""


def pattern_pins() -> list[str]:
    """
    Retourne les NIP des motifs courants, sans doublon, dans l'ordre des motifs.

    :return: Les 70 NIP.
    :rtype: list[str]
    """
    return list(dict.fromkeys(chain.from_iterable(PIN_PATTERNS.values())))


def hash_pin(pin: str) -> bytes:
    return hashlib.sha256(pin.encode("ascii")).digest()


def candidates() -> Iterator[str]:
    """Énumère les 10^6 NIP, ceux des motifs courants en premier."""
    tried = pattern_pins()
    yield from tried
    skip = set(tried)

    for value in range(PIN_SPACE):
        pin = f"{value:0{PIN_LENGTH}d}"

        if pin not in skip:
            yield pin


def crack_exhaustive(digest: bytes) -> Optional[str]:
    """
    Recherche exhaustive du NIP dont l'empreinte SHA256 est donnée.

    :param digest: L'empreinte de 32 octets.
    :type digest: bytes
    :return: Le NIP, None s'il n'existe aucun NIP à six chiffres correspondant.
    :rtype: Optional[str]
    """
    for pin in candidates():
        if hash_pin(pin) == digest:
            return pin

    return None


class PinTable:
    """
    Table précalculée des empreintes des 10^6 NIP, indexée par les 8 premiers octets de l'empreinte.
    """

    def __init__(self) -> None:
        LOGGER.debug(f"Construction de la table des {PIN_SPACE} empreintes.")
        prefixes = np.fromiter(
            (
                int.from_bytes(hash_pin(f"{value:0{PIN_LENGTH}d}")[:PREFIX_SIZE], "big")
                for value in range(PIN_SPACE)
            ),
            dtype=np.uint64,
            count=PIN_SPACE,
        )
        self.order: np.ndarray = np.argsort(prefixes, kind="stable")
        self.prefixes: np.ndarray = prefixes[self.order]

    def lookup(self, digest: bytes) -> Optional[str]:
        """
        Recherche un NIP dans la table; chaque préfixe candidat est confirmé par l'empreinte complète.

        :param digest: L'empreinte de 32 octets.
        :type digest: bytes
        :return: Le NIP, None s'il est absent de la table.
        :rtype: Optional[str]
        """
        prefix = np.uint64(int.from_bytes(digest[:PREFIX_SIZE], "big"))
        start = int(np.searchsorted(self.prefixes, prefix, side="left"))
        stop = int(np.searchsorted(self.prefixes, prefix, side="right"))

        for index in range(start, stop):
            pin = f"{int(self.order[index]):0{PIN_LENGTH}d}"

            if hash_pin(pin) == digest:
                return pin

        return None


@lru_cache(maxsize=1)
def get_pin_table() -> PinTable:
    return PinTable()


def crack_pin(digest: bytes, mode: str = "table") -> Optional[str]:
    """
    Retrouve le NIP à six chiffres correspondant à une empreinte SHA256.

    :param digest: L'empreinte de 32 octets.
    :type digest: bytes
    :param mode: 'table' (table précalculée) ou 'exhaustive'.
    :type mode: str
    :return: Le NIP, None si aucun NIP à six chiffres ne correspond.
    :rtype: Optional[str]
    :raises ValueError: Si l'empreinte n'a pas 32 octets ou si le mode est inconnu.
    """
    if len(digest) != HASH_SIZE:
        raise ValueError(f"Une empreinte SHA256 contient {HASH_SIZE} octets, {len(digest)} reçus.")

    match mode:
        case "table":
            pin = get_pin_table().lookup(digest)
        case "exhaustive":
            pin = crack_exhaustive(digest)
        case _:
            raise ValueError(f"Mode de craquage '{mode}' inconnu.")

    if pin is None:
        LOGGER.info(f"Aucun NIP à six chiffres ne correspond à l'empreinte {digest.hex()[:16]}.")

    return pin
