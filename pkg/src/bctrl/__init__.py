"""
Ce package contient le contrôleur de batterie (BCTRL) : boucle principale, contrôle de la charge,
réception des mises à jour, verrou DFU et les dix capacités malveillantes.
"""

from .bctrl_models import (
    BctrlFirmware,
    BctrlState,
    CAPABILITY_ORDER,
    Capability,
    CellSummary,
    DdtThresholds,
    MainLoopBranches,
    PatchSet,
    PayloadKind,
    STOCK_PATCH_SET,
    ScvSpoof,
    decode_firmware_body,
    encode_firmware_body,
    evaluate_branches,
    stock_code,
)
from .controller import BatteryController
from .exception_bctrl import BmonUnreachableError, CapabilityUnavailableError, FirmwareBodyError
from .firmware_receiver import FirmwareReceiver, FwUpdateSession, FwUpdateState, update_frames
from .payload_abc import MaliciousPayload, PayloadFactory

__all__ = [
    "BatteryController",
    "BctrlFirmware",
    "BctrlState",
    "BmonUnreachableError",
    "CAPABILITY_ORDER",
    "Capability",
    "CapabilityUnavailableError",
    "CellSummary",
    "DdtThresholds",
    "FirmwareBodyError",
    "FirmwareReceiver",
    "FwUpdateSession",
    "FwUpdateState",
    "MainLoopBranches",
    "MaliciousPayload",
    "PatchSet",
    "PayloadFactory",
    "PayloadKind",
    "STOCK_PATCH_SET",
    "ScvSpoof",
    "decode_firmware_body",
    "encode_firmware_body",
    "evaluate_branches",
    "stock_code",
    "update_frames",
]
