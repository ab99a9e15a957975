"""
Ce package contient les quatre attaques (UBR, UTI, DES1 à DES7, PLR) : fabrication des images
malveillantes, programmes embarqués, décodeurs du côté de l'attaquant, craquage du NIP, autorité de
déverrouillage et évaluation des scénarios.
"""

from .attack_models import (
    FIRMWARE_ENCRYPTED,
    OBSERVABLE_NOT_REACHED,
    HashFragments,
    OutcomeLabel,
    RevealCondition,
    ScenarioOutcome,
    TrackMessage,
    UbrConfig,
    any_cell_below_cuvt,
    install_rejected,
    step_failed,
)
from .capabilities import ATTACK_CAPABILITIES, ATTACK_PAYLOADS, DES_BASE, patch_set_for
from .exception_attacks import (
    AttackStepError,
    PaymentRequiredError,
    ReassemblyError,
    StockFirmwareEncryptedError,
    UnknownSerialError,
)
from .hash_fragments import is_fragment, reassemble_hash, split_hash
from .patcher import patch_stock_image, read_stock_firmware
from .payloads import PAYLOAD_CLASSES, AttackPayload, build_payload
from .pin_cracker import PIN_PATTERNS, PinTable, crack_exhaustive, crack_pin, get_pin_table, hash_pin, pattern_pins
from .scenarios import FACTORY_ATTACK, AttackScenario, craft_attack_image, run_des, run_plr, run_ubr, run_uti
from .track import build_track, decode_tracks, fingerprint_of, is_track_name, tracks_dataframe
from .unlock_authority import UnlockAuthority, UnlockRecord

__all__ = [
    "ATTACK_CAPABILITIES",
    "ATTACK_PAYLOADS",
    "AttackPayload",
    "AttackScenario",
    "AttackStepError",
    "DES_BASE",
    "FACTORY_ATTACK",
    "FIRMWARE_ENCRYPTED",
    "HashFragments",
    "OBSERVABLE_NOT_REACHED",
    "OutcomeLabel",
    "PAYLOAD_CLASSES",
    "PIN_PATTERNS",
    "PaymentRequiredError",
    "PinTable",
    "ReassemblyError",
    "RevealCondition",
    "ScenarioOutcome",
    "StockFirmwareEncryptedError",
    "TrackMessage",
    "UbrConfig",
    "UnknownSerialError",
    "UnlockAuthority",
    "UnlockRecord",
    "any_cell_below_cuvt",
    "build_payload",
    "build_track",
    "crack_exhaustive",
    "crack_pin",
    "craft_attack_image",
    "decode_tracks",
    "fingerprint_of",
    "get_pin_table",
    "hash_pin",
    "install_rejected",
    "is_fragment",
    "is_track_name",
    "pattern_pins",
    "patch_set_for",
    "patch_stock_image",
    "read_stock_firmware",
    "reassemble_hash",
    "run_des",
    "run_plr",
    "run_ubr",
    "run_uti",
    "split_hash",
    "step_failed",
    "tracks_dataframe",
]
