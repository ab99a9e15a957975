"""
Module de réception des mises à jour par le bus UART.

Ce module contient le protocole de mise à jour (trames 0x07 début, 0x08 fragment, 0x09 vérification,
0x0A finalisation) et la machine d'états de réception partagée par le BCTRL et le DRV.
"""

import struct
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Optional

from loguru import logger

from bus import Command, PacketType, UartFrame, node_name
from fwpipe import FirmwareImage, FirmwareTarget, ImageFormatError
from simkern import EventKind, EventLog

LOGGER = logger.bind(name="BES-Simulation.Bctrl.FirmwareReceiver")

START_FORMAT: str = ">BIH"
CHUNK_INDEX_FORMAT: str = ">H"


class FwUpdateState(StrEnum):
    """
    États d'une session de mise à jour.
    """

    IDLE = "idle"
    RECEIVING = "receiving"
    VALIDATING = "validating"
    INSTALLED = "installed"
    REJECTED = "rejected"


@dataclass
class FwUpdateSession:
    """
    Session de réception d'une image.
    """

    target: FirmwareTarget
    """La cible attendue."""
    expected_chunks: int = 0
    """Le nombre de fragments annoncé."""
    expected_length: int = 0
    """La longueur annoncée de l'image."""
    received: int = 0
    """Le nombre de fragments reçus."""
    image_buffer: bytearray = field(default_factory=bytearray)
    """Les octets reçus."""
    state: FwUpdateState = FwUpdateState.IDLE
    """L'état courant."""

    def reset(self) -> None:
        self.expected_chunks = 0
        self.expected_length = 0
        self.received = 0
        self.image_buffer = bytearray()
        self.state = FwUpdateState.IDLE


def update_frames(sender: int, receiver: int, target: FirmwareTarget, data: bytes, chunk_size: int) -> list[UartFrame]:
    """
    Découpe une image en trames de mise à jour.

    :param sender: L'émetteur (le BTS).
    :type sender: int
    :param receiver: Le nœud cible.
    :type receiver: int
    :param target: La cible de l'image.
    :type target: FirmwareTarget
    :param data: Les octets de l'image.
    :type data: bytes
    :param chunk_size: La taille des fragments.
    :type chunk_size: int
    :return: Les trames début, fragments, vérification et finalisation.
    :rtype: list[UartFrame]
    """
    chunks = [data[offset : offset + chunk_size] for offset in range(0, len(data), chunk_size)]

    def frame(command: Command, payload: bytes = b"") -> UartFrame:
        return UartFrame(sender=sender, receiver=receiver, ptype=PacketType.UPDATE_CTL, command=command, payload=payload)

    return [
        frame(Command.UPDATE_START, struct.pack(START_FORMAT, int(target), len(data), len(chunks))),
        *(frame(Command.UPDATE_CHUNK, struct.pack(CHUNK_INDEX_FORMAT, index) + chunk) for index, chunk in enumerate(chunks)),
        frame(Command.UPDATE_VERIFY),
        frame(Command.UPDATE_FINALIZE),
    ]


class FirmwareReceiver:
    """
    Machine d'états de réception d'une image.
    """

    def __init__(self, node: int, target: FirmwareTarget, event_log: EventLog) -> None:
        """
        :param node: Le code du nœud récepteur.
        :type node: int
        :param target: La cible acceptée par le nœud.
        :type target: FirmwareTarget
        :param event_log: Le journal d'événements.
        :type event_log: EventLog
        """
        self.node = node
        self.session = FwUpdateSession(target=target)
        self._event_log = event_log

    def _reject(self, reason: str) -> None:
        self._event_log.append(node_name(self.node), EventKind.UPDATE_REJECTED, reason=reason)
        LOGGER.warning(f"{node_name(self.node)} : session de mise à jour réinitialisée ({reason}).")
        self.session.reset()

    def handle(self, frame: UartFrame) -> Optional[FirmwareImage]:
        """
        Traite une trame de mise à jour.

        :param frame: La trame (commande 0x07 à 0x0A).
        :type frame: UartFrame
        :return: L'image reçue à la finalisation, sinon None.
        :rtype: Optional[FirmwareImage]
        """
        session = self.session

        match frame.command:
            case Command.UPDATE_START:
                if len(frame.payload) != struct.calcsize(START_FORMAT):
                    self._reject("MalformedStart")
                    return None

                target, length, chunks = struct.unpack(START_FORMAT, frame.payload)

                if target != session.target:
                    self._reject("WrongTarget")
                    return None

                session.reset()
                session.expected_length = length
                session.expected_chunks = chunks
                session.state = FwUpdateState.RECEIVING

            case Command.UPDATE_CHUNK:
                if session.state != FwUpdateState.RECEIVING or len(frame.payload) < 2:
                    self._reject("UnexpectedChunk")
                    return None

                (index,) = struct.unpack(CHUNK_INDEX_FORMAT, frame.payload[:2])

                if index != session.received:
                    self._reject("OutOfOrder")
                    return None

                session.image_buffer.extend(frame.payload[2:])
                session.received += 1

            case Command.UPDATE_VERIFY:
                if (
                    session.state != FwUpdateState.RECEIVING
                    or session.received != session.expected_chunks
                    or len(session.image_buffer) != session.expected_length
                ):
                    self._reject("Incomplete")
                    return None

                session.state = FwUpdateState.VALIDATING

            case Command.UPDATE_FINALIZE:
                if session.state != FwUpdateState.VALIDATING:
                    self._reject("NotValidated")
                    return None

                try:
                    return FirmwareImage.from_bytes(bytes(session.image_buffer))
                except ImageFormatError as error:
                    LOGGER.warning(str(error))
                    self._reject("ImageFormat")

        return None

    def complete(self, accepted: bool) -> None:
        """
        Termine la session après la décision d'installation.

        :param accepted: Indique si l'image a été installée.
        :type accepted: bool
        """
        self.session.state = FwUpdateState.INSTALLED if accepted else FwUpdateState.REJECTED
        self.session.image_buffer = bytearray()
