"""
Module de l'exfiltration de l'empreinte du mot de passe (PLR).

Ce module contient le découpage de l'empreinte SHA256 en trois noms BLE et sa reconstitution à partir
des annonces observées.
"""

from typing import Iterable

from loguru import logger

from periph import AdvertRecord

from .attack_models import FRAGMENT_COUNT, FRAGMENT_DATA_SIZE, HASH_SIZE, HashFragments
from .exception_attacks import ReassemblyError

LOGGER = logger.bind(name="BES-Simulation.Attacks.HashFragments")


def fragment_size(index: int) -> int:
    """Taille d'un nom de fragment, octet d'indice compris (14, 14 puis 7)."""
    return 1 + min(FRAGMENT_DATA_SIZE, HASH_SIZE - index * FRAGMENT_DATA_SIZE)


def split_hash(digest: bytes) -> HashFragments:
    return HashFragments.split(digest)


def is_fragment(name: bytes) -> bool:
    return len(name) > 0 and name[0] < FRAGMENT_COUNT and len(name) == fragment_size(name[0])


def reassemble_hash(adverts: Iterable[AdvertRecord]) -> bytes:
    """
    Reconstitue l'empreinte à partir des annonces. Le premier fragment observé pour chaque indice est
    retenu.

    :param adverts: Les annonces observées.
    :type adverts: Iterable[AdvertRecord]
    :return: L'empreinte de 32 octets.
    :rtype: bytes
    :raises ReassemblyError: Si un fragment manque.
    """
    found: dict[int, bytes] = {}

    for advert in adverts:
        if is_fragment(advert.name):
            found.setdefault(advert.name[0], advert.name)

    missing = [index for index in range(FRAGMENT_COUNT) if index not in found]

    if missing:
        raise ReassemblyError(missing=missing)

    digest = HashFragments(fragments=tuple(found[index] for index in range(FRAGMENT_COUNT))).join()
    LOGGER.debug(f"Empreinte reconstituée : {digest.hex()}.")

    return digest
