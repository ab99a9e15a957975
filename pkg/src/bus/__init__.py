"""
Ce package contient le bus UART partagé : codec des trames, médium de diffusion, canal sécurisé (C3)
et limitation de débit (C4).
"""

from .bus_ids import COMMAND_ACL, Command, NodeId, PacketType, WRAPPED_FLAG, is_allowed, node_name
from .exception_bus import (
    CrcMismatchError,
    FrameError,
    InvalidHeaderError,
    KeyMismatchError,
    MacFailureError,
    NotEstablishedError,
    OversizePayloadError,
    ReplayDetectedError,
    SecureChannelError,
    TruncatedFrameError,
)
from .frame import MAX_PAYLOAD, UartFrame, compute_crc, decode_frame, encode_frame, format_frame_line
from .rate_limiter import LeakyBucket, SenderRateLimiter
from .secure_channel import (
    SECURE_NODES,
    SecureChannelManager,
    SecureSession,
    establish,
    provision_channel,
    unwrap,
    wrap,
)
from .uart_bus import BusCounters, UartBus

__all__ = [
    "BusCounters",
    "COMMAND_ACL",
    "Command",
    "CrcMismatchError",
    "FrameError",
    "InvalidHeaderError",
    "KeyMismatchError",
    "LeakyBucket",
    "MAX_PAYLOAD",
    "MacFailureError",
    "NodeId",
    "NotEstablishedError",
    "OversizePayloadError",
    "PacketType",
    "ReplayDetectedError",
    "SECURE_NODES",
    "SecureChannelError",
    "SecureChannelManager",
    "SecureSession",
    "SenderRateLimiter",
    "TruncatedFrameError",
    "UartBus",
    "UartFrame",
    "WRAPPED_FLAG",
    "compute_crc",
    "decode_frame",
    "encode_frame",
    "establish",
    "format_frame_line",
    "is_allowed",
    "provision_channel",
    "unwrap",
    "wrap",
]
