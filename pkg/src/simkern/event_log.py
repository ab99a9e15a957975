"""
Module du journal d'événements.

Ce module contient le journal append-only de la simulation. Chaque enregistrement est immuable et
sérialisé en une ligne JSON {t, node, kind, detail}; la sérialisation trie les clés afin que deux
exécutions identiques produisent des fichiers identiques octet pour octet.
"""

import json
from collections import Counter
from dataclasses import dataclass
from enum import StrEnum
from types import MappingProxyType
from typing import Any, Iterable, Iterator, Mapping, Optional

from .exception_simkern import ClockRegressionError
from .kernel import SimClock


class EventKind(StrEnum):
    """
    Énumération des types d'événements du journal.
    """

    FRAME_SENT = "frame-sent"
    FRAME_DROPPED = "frame-dropped"
    FRAME_REJECTED = "frame-rejected"
    ERROR_RAISED = "error-raised"
    REBOOT = "reboot"
    ADVERT_CHANGED = "advert-changed"
    CELL_DEAD = "cell-dead"
    THRESHOLD_CROSSED = "threshold-crossed"
    ATTACK_PHASE = "attack-phase"
    UNLOCK = "unlock"
    INSTALL_ACCEPTED = "install-accepted"
    INSTALL_REJECTED = "install-rejected"
    UPDATE_REJECTED = "update-rejected"
    I2C_WRITE = "i2c-write"
    I2C_TIMEOUT = "i2c-timeout"
    BOOT = "boot"
    BOOT_ABORTED = "boot-aborted"
    POWER_ON = "power-on"
    POWER_OFF = "power-off"
    POWER_ON_FAILED = "power-on-failed"
    POWER_CYCLE_LOOP = "power-cycle-loop"
    SHIP_MODE = "ship-mode"
    SLEEP = "sleep"
    WAKE = "wake"
    CHARGING = "charging"
    BEEP = "beep"
    LOCK = "lock"
    WARNING = "warning"
    PAYMENT = "payment"
    FACTORY_RESET = "factory-reset"
    CHARGER = "charger"
    PAIRING = "pairing"
    RUN_SUMMARY = "run-summary"


@dataclass(frozen=True, slots=True)
class EventRecord:
    """
    Enregistrement immuable du journal.
    """

    t: int
    """L'instant virtuel en millisecondes."""
    seq: int
    """Le numéro de séquence dans le journal."""
    node: str
    """Le nœud émetteur de l'événement."""
    kind: EventKind
    """Le type d'événement."""
    detail: Mapping[str, Any]
    """Les données structurées de l'événement (lecture seule)."""

    def to_json(self) -> str:
        """
        Sérialise l'enregistrement en une ligne JSON stable.

        :return: La ligne JSON.
        :rtype: str
        """
        return json.dumps(
            {"t": self.t, "node": self.node, "kind": str(self.kind), "detail": dict(self.detail)},
            sort_keys=True,
            separators=(",", ":"),
        )


class EventLog:
    """
    Journal append-only ordonné par instant puis par numéro de séquence.
    """

    def __init__(self, clock: SimClock) -> None:
        """
        :param clock: L'horloge qui horodate les enregistrements.
        :type clock: SimClock
        """
        self._clock = clock
        self._records: list[EventRecord] = []
        self._counts: Counter[EventKind] = Counter()

    def append(self, node: str, kind: EventKind, **detail: Any) -> EventRecord:
        """
        Ajoute un enregistrement horodaté à l'instant courant.

        :param node: Le nœud concerné.
        :type node: str
        :param kind: Le type d'événement.
        :type kind: EventKind
        :param detail: Les données structurées.
        :type detail: Any
        :return: L'enregistrement ajouté.
        :rtype: EventRecord
        :raises ClockRegressionError: Si l'horloge est antérieure au dernier enregistrement.
        """
        now = self._clock.now

        if self._records and now < self._records[-1].t:
            raise ClockRegressionError(previous=self._records[-1].t, requested=now)

        record = EventRecord(
            t=now, seq=len(self._records), node=node, kind=kind, detail=MappingProxyType(detail)
        )
        self._records.append(record)
        self._counts[kind] += 1

        return record

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[EventRecord]:
        return iter(self._records)

    @property
    def records(self) -> tuple[EventRecord, ...]:
        """Les enregistrements (copie immuable)."""
        return tuple(self._records)

    def count(self, kind: EventKind) -> int:
        """
        Retourne le nombre d'enregistrements d'un type.

        :param kind: Le type d'événement.
        :type kind: EventKind
        :return: Le nombre d'enregistrements.
        :rtype: int
        """
        return self._counts[kind]

    def select(
        self, kind: Optional[EventKind] = None, node: Optional[str] = None, **match: Any
    ) -> list[EventRecord]:
        """
        Filtre les enregistrements.

        :param kind: Le type recherché.
        :type kind: Optional[EventKind]
        :param node: Le nœud recherché.
        :type node: Optional[str]
        :param match: Les paires clé/valeur que le détail doit contenir.
        :type match: Any
        :return: Les enregistrements correspondants.
        :rtype: list[EventRecord]
        """
        return [
            record
            for record in self._records
            if (kind is None or record.kind == kind)
            and (node is None or record.node == node)
            and all(record.detail.get(key) == value for key, value in match.items())
        ]

    def first(self, kind: EventKind, node: Optional[str] = None, **match: Any) -> Optional[EventRecord]:
        """
        Retourne le premier enregistrement correspondant.

        :param kind: Le type recherché.
        :type kind: EventKind
        :param node: Le nœud recherché.
        :type node: Optional[str]
        :param match: Les paires clé/valeur que le détail doit contenir.
        :type match: Any
        :return: L'enregistrement ou None.
        :rtype: Optional[EventRecord]
        """
        return next(
            (
                record
                for record in self._records
                if record.kind == kind
                and (node is None or record.node == node)
                and all(record.detail.get(key) == value for key, value in match.items())
            ),
            None,
        )

    def to_jsonl(self) -> str:
        """
        Sérialise le journal complet en lignes JSON.

        :return: Le contenu du fichier events.jsonl.
        :rtype: str
        """
        return "".join(f"{line}\n" for line in self.iter_json())

    def iter_json(self) -> Iterable[str]:
        """
        Itère sur les lignes JSON du journal.

        :return: Les lignes JSON.
        :rtype: Iterable[str]
        """
        return (record.to_json() for record in self._records)
