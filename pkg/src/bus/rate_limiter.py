"""
Module de limitation de débit du bus UART.

Ce module contient le seau percé (leaky bucket) en temps virtuel utilisé par la contre-mesure de
limitation de débit : chaque émetteur annoncé dispose de son propre seau, les trames excédentaires sont
rejetées. Les jetons sont comptés en millièmes pour rester exacts en arithmétique entière.
"""

from dataclasses import dataclass, field

from loguru import logger

LOGGER = logger.bind(name="BES-Simulation.Bus.RateLimiter")

MILLI: int = 1000


@dataclass
class LeakyBucket:
    """
    Seau percé en temps virtuel.
    """

    capacity: int
    """La capacité du seau en jetons."""
    drain_rate: int
    """Le débit de remplissage en jetons par seconde virtuelle."""
    _state: tuple[int, int] = field(default=None, repr=False)
    """L'instant de la dernière mise à jour et le niveau en millièmes de jeton."""

    def __post_init__(self) -> None:
        if self.capacity <= 0:
            raise ValueError("La capacité du seau doit être supérieure à 0.")
        if self.drain_rate <= 0:
            raise ValueError("Le débit du seau doit être supérieur à 0.")

        if self._state is None:
            self._state = (0, self.capacity * MILLI)

    @property
    def level(self) -> float:
        """Le niveau courant en jetons (à l'instant de la dernière mise à jour)."""
        return self._state[1] / MILLI

    def _update_state(self, at: int) -> int:
        last_updated_at, last_volume = self._state
        elapsed = max(0, at - last_updated_at)
        volume = min(self.capacity * MILLI, last_volume + self.drain_rate * elapsed)
        self._state = (max(at, last_updated_at), volume)

        return volume

    def admit(self, at: int) -> bool:
        """
        Consomme un jeton si possible.

        :param at: L'instant virtuel en millisecondes.
        :type at: int
        :return: Vrai si la trame est admise, faux si elle doit être rejetée.
        :rtype: bool
        """
        volume = self._update_state(at)

        if volume < MILLI:
            return False

        self._state = (self._state[0], volume - MILLI)

        return True


@dataclass
class SenderRateLimiter:
    """
    Ensemble de seaux percés, un par émetteur annoncé.
    """

    capacity: int
    """La capacité de chaque seau."""
    drain_rate: int
    """Le débit de chaque seau."""
    buckets: dict[int, LeakyBucket] = field(default_factory=dict)
    """Les seaux par code d'émetteur."""
    dropped: dict[int, int] = field(default_factory=dict)
    """Le nombre de trames rejetées par émetteur."""

    def admit(self, sender: int, at: int) -> bool:
        """
        Décide de l'admission d'une trame.

        :param sender: Le code de l'émetteur annoncé.
        :type sender: int
        :param at: L'instant virtuel.
        :type at: int
        :return: Vrai si la trame est admise.
        :rtype: bool
        """
        bucket = self.buckets.get(sender)

        if bucket is None:
            bucket = self.buckets[sender] = LeakyBucket(capacity=self.capacity, drain_rate=self.drain_rate)

        if bucket.admit(at):
            return True

        if sender not in self.dropped:
            LOGGER.warning(f"Limitation de débit : premier rejet des trames de 0x{sender:02X} à t={at} ms.")

        self.dropped[sender] = self.dropped.get(sender, 0) + 1

        return False
