"""
Ce package contient le modèle électrochimique du pack 10s3p, le moniteur de batterie (BMON) et ses
outils de calibration et de visualisation.
"""

from .battery_pack import BatteryPack, compute_batt_level, open_circuit_voltage, soc_fraction_for_level
from .bmon import (
    BatteryMonitor,
    BmonRegisters,
    FaultFlags,
    I2cMessage,
    I2cOperation,
    Register,
    VC_REGISTERS,
    hardware_protect_check,
    i2c_access,
)
from .exception_battery import I2cTimeoutError, UnknownRegisterError
from .pack_models import CELL_GROUPS, CellGroup, PackSpec, Thresholds

__all__ = [
    "BatteryMonitor",
    "BatteryPack",
    "BmonRegisters",
    "CELL_GROUPS",
    "CellGroup",
    "FaultFlags",
    "I2cMessage",
    "I2cOperation",
    "I2cTimeoutError",
    "PackSpec",
    "Register",
    "Thresholds",
    "UnknownRegisterError",
    "VC_REGISTERS",
    "compute_batt_level",
    "hardware_protect_check",
    "i2c_access",
    "open_circuit_voltage",
    "soc_fraction_for_level",
]
