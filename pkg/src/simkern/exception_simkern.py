"""
Exceptions spécifiques au noyau de simulation.

Ce module contient les exceptions levées par l'horloge virtuelle et l'ordonnanceur.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class SchedulingInPastError(Exception):
    """
    Exception levée lorsqu'un événement est planifié avant l'instant courant.

    :param at: L'instant demandé en millisecondes virtuelles.
    :type at: int
    :param now: L'instant courant en millisecondes virtuelles.
    :type now: int
    """

    at: int
    """L'instant demandé."""
    now: int
    """L'instant courant."""

    def __str__(self) -> str:
        return f"Impossible de planifier un événement à t={self.at} ms : l'horloge est déjà à t={self.now} ms."


@dataclass(frozen=True)
class ClockRegressionError(Exception):
    """
    Exception levée lorsqu'un enregistrement ou une avance d'horloge remonterait le temps.

    :param previous: Le dernier instant connu.
    :type previous: int
    :param requested: L'instant demandé.
    :type requested: int
    """

    previous: int
    """Le dernier instant connu."""
    requested: int
    """L'instant demandé."""

    def __str__(self) -> str:
        return f"Le temps virtuel ne peut pas reculer de t={self.previous} ms à t={self.requested} ms."
