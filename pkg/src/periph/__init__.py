"""
Ce package contient les périphériques de la trottinette : module Bluetooth (BTS), contrôleur moteur
(DRV), chargeur, renifleur BLE de l'attaquant et utilisateur scripté.
"""

from .bts import BluetoothModule
from .charger import Charger
from .drv import MotorDriver
from .exception_periph import UnknownFieldError
from .periph_models import (
    BtsState,
    DrvState,
    ERROR_DESCRIPTIONS,
    ErrorCode,
    LockState,
    MAX_NAME_SIZE,
    PowerSwitch,
    default_ble_name,
    make_drv_id,
)
from .sniffer import AdvertRecord, Sniffer
from .user import ScriptedUser

__all__ = [
    "AdvertRecord",
    "BluetoothModule",
    "BtsState",
    "Charger",
    "DrvState",
    "ERROR_DESCRIPTIONS",
    "ErrorCode",
    "LockState",
    "MAX_NAME_SIZE",
    "MotorDriver",
    "PowerSwitch",
    "ScriptedUser",
    "Sniffer",
    "UnknownFieldError",
    "default_ble_name",
    "make_drv_id",
]
