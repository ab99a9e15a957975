"""
Module du noyau de simulation à événements discrets.

Ce module contient l'horloge virtuelle et l'ordonnanceur. Les événements sont triés par
(instant, numéro de séquence) : deux événements au même instant sont exécutés dans l'ordre d'insertion.
"""

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

from loguru import logger

from .exception_simkern import SchedulingInPastError, ClockRegressionError

LOGGER = logger.bind(name="BES-Simulation.Simkern.Kernel")

Callback = Callable[[], None]


@dataclass
class SimClock:
    """
    Horloge virtuelle en millisecondes depuis le début du scénario.
    """

    now: int = 0
    """L'instant courant."""

    def advance_to(self, at: int) -> None:
        """
        Avance l'horloge.

        :param at: Le nouvel instant.
        :type at: int
        :raises ClockRegressionError: Si l'instant est antérieur à l'instant courant.
        """
        if at < self.now:
            raise ClockRegressionError(previous=self.now, requested=at)

        self.now = at


@dataclass(eq=False)
class EventHandle:
    """
    Référence vers un événement planifié, utilisée pour l'annuler.
    """

    at: int
    """L'instant de déclenchement."""
    seq: int
    """Le numéro de séquence (départage des égalités)."""
    callback: Callback
    """La fonction à exécuter."""
    label: str = ""
    """Une étiquette de débogage."""
    cancelled: bool = False
    """Indique si l'événement a été annulé."""
    dispatched: bool = False
    """Indique si l'événement a été exécuté."""

    @property
    def pending(self) -> bool:
        """Indique si l'événement attend encore son exécution."""
        return not (self.cancelled or self.dispatched)


@dataclass(eq=False)
class PeriodicHandle:
    """
    Référence vers un événement périodique.
    """

    period: int
    """La période en millisecondes."""
    current: Optional[EventHandle] = None
    """La prochaine occurrence planifiée."""
    cancelled: bool = False
    """Indique si la série a été annulée."""


@dataclass
class SimKernel:
    """
    Ordonnanceur déterministe à file de priorité.
    """

    clock: SimClock = field(default_factory=SimClock)
    """L'horloge virtuelle."""
    _queue: list[tuple[int, int, EventHandle]] = field(default_factory=list)
    _sequence: itertools.count = field(default_factory=itertools.count)
    _stopped: bool = False
    dispatched: int = 0
    """Le nombre d'événements exécutés."""

    @property
    def now(self) -> int:
        """L'instant courant."""
        return self.clock.now

    def schedule(self, callback: Callback, at: int, label: str = "") -> EventHandle:
        """
        Planifie un événement.

        :param callback: La fonction à exécuter.
        :type callback: Callback
        :param at: L'instant de déclenchement.
        :type at: int
        :param label: Une étiquette de débogage.
        :type label: str
        :return: La référence de l'événement.
        :rtype: EventHandle
        :raises SchedulingInPastError: Si l'instant est antérieur à l'instant courant.
        """
        if at < self.clock.now:
            raise SchedulingInPastError(at=at, now=self.clock.now)

        handle = EventHandle(at=at, seq=next(self._sequence), callback=callback, label=label)
        heapq.heappush(self._queue, (at, handle.seq, handle))

        return handle

    def schedule_in(self, delay: int, callback: Callback, label: str = "") -> EventHandle:
        """
        Planifie un événement après un délai relatif.

        :param delay: Le délai en millisecondes (>= 0).
        :type delay: int
        :param callback: La fonction à exécuter.
        :type callback: Callback
        :param label: Une étiquette de débogage.
        :type label: str
        :return: La référence de l'événement.
        :rtype: EventHandle
        """
        return self.schedule(callback=callback, at=self.clock.now + delay, label=label)

    def every(self, period: int, callback: Callback, start: Optional[int] = None, label: str = "") -> PeriodicHandle:
        """
        Planifie un événement périodique.

        :param period: La période en millisecondes (> 0).
        :type period: int
        :param callback: La fonction à exécuter.
        :type callback: Callback
        :param start: Le premier instant; par défaut l'instant courant.
        :type start: Optional[int]
        :param label: Une étiquette de débogage.
        :type label: str
        :return: La référence de la série.
        :rtype: PeriodicHandle
        """
        if period <= 0:
            raise ValueError("La période d'un événement périodique doit être supérieure à 0.")

        periodic = PeriodicHandle(period=period)

        def fire() -> None:
            if periodic.cancelled:
                return

            periodic.current = self.schedule_in(period, fire, label)
            callback()

        periodic.current = self.schedule(fire, self.clock.now if start is None else start, label)

        return periodic

    @staticmethod
    def cancel(handle: EventHandle | PeriodicHandle | None) -> None:
        """
        Annule un événement ou une série périodique avant son exécution.

        :param handle: La référence à annuler.
        :type handle: EventHandle | PeriodicHandle | None
        """
        if handle is None:
            return

        handle.cancelled = True

        if isinstance(handle, PeriodicHandle) and handle.current is not None:
            handle.current.cancelled = True

    def stop(self) -> None:
        """
        Arrête la boucle d'événements à la fin de l'événement courant.
        """
        self._stopped = True

    @property
    def stopped(self) -> bool:
        """Indique si la boucle a été arrêtée."""
        return self._stopped

    def run(self, until: int) -> int:
        """
        Exécute les événements jusqu'à l'instant donné inclus.

        :param until: L'instant de fin.
        :type until: int
        :return: Le nombre d'événements exécutés.
        :rtype: int
        """
        count = 0

        while self._queue and not self._stopped:
            at, _, handle = self._queue[0]

            if at > until:
                break

            heapq.heappop(self._queue)

            if handle.cancelled:
                continue

            self.clock.advance_to(at)
            handle.dispatched = True
            handle.callback()
            count += 1

        if not self._stopped:
            self.clock.advance_to(max(self.clock.now, until))

        self.dispatched += count
        LOGGER.debug(f"{count} événements exécutés jusqu'à t={self.clock.now} ms.")

        return count
