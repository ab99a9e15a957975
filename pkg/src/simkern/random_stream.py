"""
Module des générateurs pseudo-aléatoires nommés.

Toute l'aléa de la simulation (numéros de série, codes de déverrouillage, nonces, clés) provient de flux
nommés dérivés de la graine du scénario; un flux donné produit la même suite quel que soit l'ordre
dans lequel les autres flux sont consommés.
"""

import zlib

import numpy as np


class RandomStreams:
    """
    Fabrique de générateurs numpy nommés et reproductibles.
    """

    def __init__(self, seed: int) -> None:
        """
        :param seed: La graine du scénario (64 bits).
        :type seed: int
        """
        self.seed: int = seed
        self._streams: dict[str, np.random.Generator] = {}

    def stream(self, name: str) -> np.random.Generator:
        """
        Retourne le générateur associé à un nom.

        :param name: Le nom du flux (ex. 'serial', 'unlock-code').
        :type name: str
        :return: Le générateur.
        :rtype: np.random.Generator
        """
        if name not in self._streams:
            sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(zlib.crc32(name.encode()),))
            self._streams[name] = np.random.Generator(np.random.PCG64(sequence))

        return self._streams[name]

    def random_bytes(self, name: str, length: int) -> bytes:
        """
        Tire des octets aléatoires d'un flux.

        :param name: Le nom du flux.
        :type name: str
        :param length: Le nombre d'octets.
        :type length: int
        :return: Les octets.
        :rtype: bytes
        """
        return self.stream(name).bytes(length)

    def integer(self, name: str, low: int, high: int) -> int:
        """
        Tire un entier dans [low, high).

        :param name: Le nom du flux.
        :type name: str
        :param low: La borne inférieure incluse.
        :type low: int
        :param high: La borne supérieure exclue.
        :type high: int
        :return: L'entier.
        :rtype: int
        """
        return int(self.stream(name).integers(low, high))
