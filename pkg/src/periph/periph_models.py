"""
Module des modèles de données des périphériques.

Ce module contient les états du BTS et du DRV, les codes d'erreur du DRV, la génération du numéro de
série DRV et l'interrupteur d'alimentation de la trottinette.
"""

import hashlib
from dataclasses import dataclass, field
from enum import IntEnum, StrEnum
from typing import Callable, Optional

from loguru import logger

from battery import BatteryMonitor
from bus import Command
from config import DrvDataConfig
from simkern import EventKind, EventLog, RandomStreams

from .exception_periph import UnknownFieldError

LOGGER = logger.bind(name="BES-Simulation.Periph.Models")

MAX_NAME_SIZE: int = 14
DRV_ID_SIZE: int = 14
DEFAULT_NAME_PREFIX: bytes = b"MIScooter"


class ErrorCode(IntEnum):
    """
    Codes d'erreur affichés par le DRV.
    """

    E21 = 21
    E23 = 23
    E24 = 24

    @property
    def description(self) -> str:
        return ERROR_DESCRIPTIONS[self]

    @property
    def powers_off(self) -> bool:
        """Indique si l'erreur éteint la trottinette après le délai d'extinction."""
        return self in (ErrorCode.E21, ErrorCode.E24)


ERROR_DESCRIPTIONS: dict[ErrorCode, str] = {
    ErrorCode.E21: "No Communication with BMS",
    ErrorCode.E23: "Internal BMS not activated",
    ErrorCode.E24: "Supply Voltage out of range",
}


class LockState(StrEnum):
    """
    État de l'antivol du moteur.
    """

    LOCKED = "locked"
    UNLOCKED = "unlocked"


def default_ble_name(drv_id: bytes) -> bytes:
    """
    Retourne le nom BLE d'usine : préfixe suivi des quatre derniers caractères du numéro de série.

    :param drv_id: Le numéro de série DRV.
    :type drv_id: bytes
    :return: Le nom (14 octets au plus).
    :rtype: bytes
    """
    return (DEFAULT_NAME_PREFIX + drv_id[-4:])[:MAX_NAME_SIZE]


@dataclass
class BtsState:
    """
    État du module Bluetooth (BTS).
    """

    ble_name: bytes
    """Le nom BLE annoncé (14 octets au plus)."""
    default_name: bytes
    """Le nom d'usine rétabli par la réinitialisation."""
    version: str
    """La version du micrologiciel BTS."""
    paired: bool = True
    """Indique qu'une application est appairée."""
    advertising: bool = False
    """Indique que le BTS annonce son nom."""
    drv_serial: Optional[bytes] = None
    """Le numéro de série DRV lu au démarrage."""
    batt_level: Optional[int] = None
    """Le dernier niveau de batterie reçu du BCTRL."""

    def __post_init__(self) -> None:
        if len(self.ble_name) > MAX_NAME_SIZE:
            raise ValueError("Le nom BLE ne peut pas dépasser 14 octets.")


def make_drv_id(model_code: str, streams: RandomStreams) -> bytes:
    """
    Génère le numéro de série DRV : préfixe de modèle (6 caractères), puis date de production AAMMJJ,
    révision et identifiant d'unité.

    :param model_code: Le préfixe de modèle.
    :type model_code: str
    :param streams: Les générateurs du scénario.
    :type streams: RandomStreams
    :return: Le numéro de série (14 octets ASCII).
    :rtype: bytes
    """
    year = streams.integer("drv-id", 18, 24)
    month = streams.integer("drv-id", 1, 13)
    day = streams.integer("drv-id", 1, 29)
    revision = streams.integer("drv-id", 0, 10)
    unit = streams.integer("drv-id", 0, 10)

    return f"{model_code}{year:02d}{month:02d}{day:02d}{revision}{unit}".encode("ascii")


@dataclass
class DrvState:
    """
    État du contrôleur moteur (DRV).
    """

    drv_id: bytes
    """Le numéro de série (14 octets)."""
    password_hash: bytes
    """Le SHA-256 du mot de passe à six chiffres."""
    version: str
    """La version du micrologiciel DRV."""
    mileage_km: int = 0
    last_travel_km: int = 0
    last_travel_min: int = 0
    avg_speed_kmh: int = 0
    motor_voltage_mv: float = 0.0
    """La tension d'alimentation mesurée par le DRV."""
    lock_state: LockState = LockState.UNLOCKED
    error_state: Optional[ErrorCode] = None
    error_timer: Optional[int] = None
    """L'instant où l'erreur courante a été levée."""
    lights_on: bool = False

    def __post_init__(self) -> None:
        if len(self.drv_id) != DRV_ID_SIZE:
            raise ValueError("Le numéro de série DRV doit contenir 14 octets.")

    @classmethod
    def from_config(cls, drv_id: bytes, version: str, data: DrvDataConfig) -> "DrvState":
        return cls(
            drv_id=drv_id,
            password_hash=hashlib.sha256(data.password.encode("ascii")).digest(),
            version=version,
            mileage_km=data.mileage_km,
            last_travel_km=data.last_travel_km,
            last_travel_min=data.last_travel_min,
            avg_speed_kmh=data.avg_speed_kmh,
        )

    @property
    def locked(self) -> bool:
        return self.lock_state == LockState.LOCKED

    def read_field(self, command: int) -> bytes:
        """
        Retourne la valeur encodée d'un champ lisible.

        :param command: La commande de lecture.
        :type command: int
        :return: Les octets du champ (compteurs en u16 gros-boutiste).
        :rtype: bytes
        :raises UnknownFieldError: Si la commande ne correspond à aucun champ.
        """
        match command:
            case Command.DRV_ID:
                return self.drv_id
            case Command.PASSWORD_HASH:
                return self.password_hash
            case Command.MILEAGE:
                return self.mileage_km.to_bytes(2, "big")
            case Command.LAST_TRAVEL_KM:
                return self.last_travel_km.to_bytes(2, "big")
            case Command.AVG_SPEED:
                return self.avg_speed_kmh.to_bytes(2, "big")
            case Command.LAST_TRAVEL_MIN:
                return self.last_travel_min.to_bytes(2, "big")

        raise UnknownFieldError(command=command)


PowerListener = Callable[[], None]


@dataclass
class PowerSwitch:
    """
    Interrupteur d'alimentation : le BTS et le DRV sont alimentés si la trottinette est allumée et si le
    BMON n'est pas en mode SHIP.
    """

    bmon: BatteryMonitor
    """Le moniteur de batterie."""
    event_log: EventLog
    """Le journal d'événements."""
    scooter_on: bool = False
    """La position de l'interrupteur."""
    on_power_on: list[PowerListener] = field(default_factory=list)
    on_power_off: list[PowerListener] = field(default_factory=list)

    def nodes_powered(self) -> bool:
        return self.scooter_on and not self.bmon.ship_mode

    def power_on(self, source: str) -> bool:
        """
        Allume la trottinette.

        :param source: L'origine de la demande.
        :type source: str
        :return: Vrai si la trottinette est allumée.
        :rtype: bool
        """
        if self.bmon.ship_mode:
            self.event_log.append("POWER", EventKind.POWER_ON_FAILED, source=source, reason="ship-mode")
            LOGGER.warning("Allumage impossible : le BMON est en mode SHIP.")
            return False

        if self.scooter_on:
            return True

        self.scooter_on = True
        self.event_log.append("POWER", EventKind.POWER_ON, source=source)

        for listener in tuple(self.on_power_on):
            listener()

        return True

    def power_off(self, reason: str) -> None:
        """
        Éteint la trottinette.

        :param reason: La cause de l'extinction.
        :type reason: str
        """
        if not self.scooter_on:
            return

        self.scooter_on = False
        self.event_log.append("POWER", EventKind.POWER_OFF, reason=reason)
        LOGGER.info(f"Extinction de la trottinette ({reason}).")

        for listener in tuple(self.on_power_off):
            listener()
