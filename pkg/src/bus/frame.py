"""
Module du codec des trames UART.

Ce module contient la trame UART, le calcul du CRC (complément de la somme des octets), l'encodage et le
décodage des trames et le format de ligne du vidage des trames.

Format d'une trame : ``0x55 0xAA len sender receiver ptype command payload crc16-LE``, le CRC couvrant
tous les octets qui le précèdent, en-tête compris.
"""

import struct
from dataclasses import dataclass

from .bus_ids import Command, PacketType, WRAPPED_FLAG, node_name
from .exception_bus import CrcMismatchError, InvalidHeaderError, OversizePayloadError, TruncatedFrameError

HEADER: bytes = b"\x55\xaa"
MAX_PAYLOAD: int = 64
FRAME_OVERHEAD: int = 9
"""En-tête (2) + longueur + émetteur + destinataire + type + commande + CRC (2)."""


def compute_crc(data: bytes) -> int:
    """
    Calcule le CRC d'une trame : 0xFFFF moins la somme des octets modulo 0x10000.

    :param data: Les octets couverts.
    :type data: bytes
    :return: Le CRC sur 16 bits.
    :rtype: int
    """
    return 0xFFFF - (sum(data) % 0x10000)


@dataclass(frozen=True, slots=True)
class UartFrame:
    """
    Trame du bus UART.
    """

    sender: int
    """Le code de l'émetteur annoncé (non vérifié sans canal sécurisé)."""
    receiver: int
    """Le code du destinataire."""
    ptype: int
    """Le type de paquet (bit 0x80 pour une trame protégée)."""
    command: int
    """La commande."""
    payload: bytes = b""
    """La charge utile (0 à 64 octets)."""

    @property
    def wrapped(self) -> bool:
        """Indique si la trame est protégée par le canal sécurisé."""
        return bool(self.ptype & WRAPPED_FLAG)

    @property
    def base_ptype(self) -> int:
        """Le type de paquet sans le bit de protection."""
        return self.ptype & ~WRAPPED_FLAG & 0xFF

    @property
    def covered_bytes(self) -> bytes:
        """Les octets couverts par le CRC : en-tête, longueur, adresses, type, commande et charge utile."""
        return HEADER + bytes([len(self.payload), self.sender, self.receiver, self.ptype, self.command]) + self.payload

    @property
    def crc(self) -> int:
        """Le CRC de la trame."""
        return compute_crc(self.covered_bytes)


def encode_frame(frame: UartFrame) -> bytes:
    """
    Encode une trame.

    :param frame: La trame.
    :type frame: UartFrame
    :return: Les octets de la trame.
    :rtype: bytes
    :raises OversizePayloadError: Si la charge utile dépasse 64 octets.
    """
    if len(frame.payload) > MAX_PAYLOAD:
        raise OversizePayloadError(length=len(frame.payload))

    covered = frame.covered_bytes

    return covered + struct.pack("<H", compute_crc(covered))


def decode_frame(data: bytes) -> UartFrame:
    """
    Décode une trame.

    :param data: Les octets reçus.
    :type data: bytes
    :return: La trame.
    :rtype: UartFrame
    :raises InvalidHeaderError: Si l'en-tête est absent.
    :raises TruncatedFrameError: Si la trame est plus courte que sa longueur annoncée.
    :raises OversizePayloadError: Si la longueur annoncée dépasse 64 octets.
    :raises CrcMismatchError: Si le CRC est invalide.
    """
    if len(data) < 3:
        raise TruncatedFrameError(length=len(data), expected=FRAME_OVERHEAD)

    if data[:2] != HEADER:
        raise InvalidHeaderError(header=bytes(data[:2]))

    length = data[2]

    if length > MAX_PAYLOAD:
        raise OversizePayloadError(length=length)

    expected = FRAME_OVERHEAD + length

    if len(data) != expected:
        raise TruncatedFrameError(length=len(data), expected=expected)

    covered = bytes(data[: 7 + length])
    (received,) = struct.unpack("<H", data[7 + length :])
    computed = compute_crc(covered)

    if received != computed:
        raise CrcMismatchError(expected=computed, received=received)

    return UartFrame(
        sender=covered[3], receiver=covered[4], ptype=covered[5], command=covered[6], payload=covered[7:]
    )


def _type_name(ptype: int) -> str:
    try:
        return PacketType(ptype & ~WRAPPED_FLAG & 0xFF).name
    except ValueError:
        return f"0x{ptype:02X}"


def _command_name(command: int) -> str:
    try:
        return f"{Command(command).name}(0x{command:02X})"
    except ValueError:
        return f"0x{command:02X}"


def format_frame_line(t: int, frame: UartFrame) -> str:
    """
    Formate une ligne du vidage des trames.

    :param t: L'instant d'émission.
    :type t: int
    :param frame: La trame.
    :type frame: UartFrame
    :return: La ligne ``t=<ms> <émetteur>→<destinataire> type=<..> cmd=<..> payload=<hex> crc=<hex> [wrapped]``.
    :rtype: str
    """
    line = (
        f"t={t} {node_name(frame.sender)}→{node_name(frame.receiver)} type={_type_name(frame.ptype)} "
        f"cmd={_command_name(frame.command)} payload={frame.payload.hex()} crc={frame.crc:04x}"
    )

    return f"{line} [wrapped]" if frame.wrapped else line
