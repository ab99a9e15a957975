"""
Module du renifleur BLE de l'attaquant.

Ce module contient l'observateur de proximité qui enregistre les annonces BLE de la trottinette. C'est
la seule donnée externe dont dispose l'attaquant pour UTI et PLR.
"""

import json
from dataclasses import dataclass, field

from loguru import logger

LOGGER = logger.bind(name="BES-Simulation.Periph.Sniffer")


@dataclass(frozen=True)
class AdvertRecord:
    """
    Annonce BLE observée.
    """

    t: int
    """L'instant d'observation."""
    name: bytes
    """Le nom annoncé."""

    def to_json(self) -> str:
        return json.dumps({"t": self.t, "advName": self.name.hex()}, sort_keys=True, separators=(",", ":"))


@dataclass
class Sniffer:
    """
    Renifleur BLE passif.
    """

    adverts: list[AdvertRecord] = field(default_factory=list)
    """Les annonces dans l'ordre d'observation."""

    def observe(self, t: int, name: bytes) -> None:
        self.adverts.append(AdvertRecord(t=t, name=bytes(name)))
        LOGGER.debug(f"Annonce BLE à {t} ms : {name!r}.")

    def window(self, start: int = 0, end: int | None = None) -> list[AdvertRecord]:
        """
        Retourne les annonces observées dans une fenêtre.

        :param start: Le début inclus.
        :type start: int
        :param end: La fin exclue, None pour la fin de l'exécution.
        :type end: int | None
        :return: Les annonces horodatées.
        :rtype: list[AdvertRecord]
        """
        return [advert for advert in self.adverts if advert.t >= start and (end is None or advert.t < end)]

    def names(self, start: int = 0) -> list[bytes]:
        return [advert.name for advert in self.window(start)]

    def to_jsonl(self) -> str:
        """
        Sérialise les annonces en lignes JSON {t, advName}.

        :return: Le contenu du fichier sniffer.jsonl.
        :rtype: str
        """
        return "".join(f"{advert.to_json()}\n" for advert in self.adverts)
