"""
Module du canal sécurisé du bus UART.

Ce module contient les sessions sécurisées par paires de nœuds : établissement à partir d'une clé
pré-partagée et de deux défis (dérivation HKDF-SHA256 des clés de chiffrement et d'authentification,
cryptogrammes de preuve de possession), puis protection des trames par AES-128-CTR et CMAC-AES-128
tronqué à 8 octets avec un compteur monotone par sens.

Charge utile protégée : ``compteur (4, gros-boutiste) ‖ chiffré ‖ MAC (8)``.
"""

import hmac
import struct
from dataclasses import dataclass, field
from typing import Optional

from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes
from cryptography.hazmat.primitives.cmac import CMAC
from cryptography.hazmat.primitives.kdf.hkdf import HKDF
from loguru import logger

from simkern import RandomStreams

from .bus_ids import NodeId, WRAPPED_FLAG
from .exception_bus import KeyMismatchError, MacFailureError, NotEstablishedError, ReplayDetectedError
from .frame import UartFrame

LOGGER = logger.bind(name="BES-Simulation.Bus.SecureChannel")

KEY_SIZE: int = 16
CHALLENGE_SIZE: int = 8
COUNTER_SIZE: int = 4
MAC_SIZE: int = 8
WRAP_OVERHEAD: int = COUNTER_SIZE + MAC_SIZE
MAX_COUNTER: int = 0xFFFFFFFF
KDF_LABEL: bytes = b"BES-UART-SCP"


def _cmac(key: bytes, data: bytes) -> bytes:
    mac = CMAC(algorithms.AES(key))
    mac.update(data)

    return mac.finalize()


def _ctr(key: bytes, nonce: bytes, data: bytes) -> bytes:
    cipher = Cipher(algorithms.AES(key), modes.CTR(nonce)).encryptor()

    return cipher.update(data) + cipher.finalize()


def derive_session_keys(
    psk: bytes, initiator: int, responder: int, host_challenge: bytes, card_challenge: bytes
) -> tuple[bytes, bytes]:
    """
    Dérive les clés de chiffrement et d'authentification d'une session.

    :param psk: La clé pré-partagée (16 octets).
    :type psk: bytes
    :param initiator: Le code du nœud initiateur.
    :type initiator: int
    :param responder: Le code du nœud répondeur.
    :type responder: int
    :param host_challenge: Le défi de l'initiateur.
    :type host_challenge: bytes
    :param card_challenge: Le défi du répondeur.
    :type card_challenge: bytes
    :return: La clé de chiffrement et la clé d'authentification.
    :rtype: tuple[bytes, bytes]
    :raises ValueError: Si la clé pré-partagée n'a pas 16 octets.
    """
    if len(psk) != KEY_SIZE:
        raise ValueError("La clé pré-partagée doit contenir 16 octets.")

    material = HKDF(
        algorithm=hashes.SHA256(),
        length=2 * KEY_SIZE,
        salt=host_challenge + card_challenge,
        info=KDF_LABEL + bytes([initiator, responder]),
    ).derive(psk)

    return material[:KEY_SIZE], material[KEY_SIZE:]


def compute_cryptogram(mac_key: bytes, label: bytes, host_challenge: bytes, card_challenge: bytes) -> bytes:
    """
    Calcule un cryptogramme d'authentification de session.

    :param mac_key: La clé d'authentification.
    :type mac_key: bytes
    :param label: Le libellé (b"card" ou b"host").
    :type label: bytes
    :param host_challenge: Le défi de l'initiateur.
    :type host_challenge: bytes
    :param card_challenge: Le défi du répondeur.
    :type card_challenge: bytes
    :return: Le cryptogramme de 8 octets.
    :rtype: bytes
    """
    return _cmac(mac_key, label + host_challenge + card_challenge)[:MAC_SIZE]


@dataclass
class SecureSession:
    """
    Extrémité d'une session sécurisée entre deux nœuds.
    """

    local: int
    """Le code du nœud local."""
    peer: int
    """Le code du nœud distant."""
    psk: bytes
    """La clé pré-partagée."""
    enc_key: bytes = b""
    """La clé de chiffrement dérivée."""
    mac_key: bytes = b""
    """La clé d'authentification dérivée."""
    tx_counter: int = 0
    """Le dernier compteur émis."""
    rx_counter: int = 0
    """Le dernier compteur accepté."""
    established: bool = False
    """Indique si la session est établie."""


def establish(
    initiator: int,
    responder: int,
    initiator_psk: bytes,
    responder_psk: bytes,
    host_challenge: bytes,
    card_challenge: bytes,
) -> tuple[SecureSession, SecureSession]:
    """
    Établit une session entre deux nœuds : chaque extrémité dérive ses clés avec sa propre clé
    pré-partagée, puis les cryptogrammes croisés vérifient que les deux dérivations concordent.

    :param initiator: Le code du nœud initiateur.
    :type initiator: int
    :param responder: Le code du nœud répondeur.
    :type responder: int
    :param initiator_psk: La clé pré-partagée de l'initiateur.
    :type initiator_psk: bytes
    :param responder_psk: La clé pré-partagée du répondeur.
    :type responder_psk: bytes
    :param host_challenge: Le défi de l'initiateur.
    :type host_challenge: bytes
    :param card_challenge: Le défi du répondeur.
    :type card_challenge: bytes
    :return: Les sessions de l'initiateur et du répondeur, compteurs à zéro.
    :rtype: tuple[SecureSession, SecureSession]
    :raises KeyMismatchError: Si les clés pré-partagées diffèrent.
    """
    host_enc, host_mac = derive_session_keys(initiator_psk, initiator, responder, host_challenge, card_challenge)
    card_enc, card_mac = derive_session_keys(responder_psk, initiator, responder, host_challenge, card_challenge)

    card_cryptogram = compute_cryptogram(card_mac, b"card", host_challenge, card_challenge)
    expected_card = compute_cryptogram(host_mac, b"card", host_challenge, card_challenge)

    if not hmac.compare_digest(card_cryptogram, expected_card):
        raise KeyMismatchError(initiator=initiator, responder=responder)

    host_cryptogram = compute_cryptogram(host_mac, b"host", host_challenge, card_challenge)
    expected_host = compute_cryptogram(card_mac, b"host", host_challenge, card_challenge)

    if not hmac.compare_digest(host_cryptogram, expected_host):
        raise KeyMismatchError(initiator=initiator, responder=responder)

    LOGGER.debug(f"Session sécurisée établie entre 0x{initiator:02X} et 0x{responder:02X}.")

    return (
        SecureSession(initiator, responder, initiator_psk, host_enc, host_mac, established=True),
        SecureSession(responder, initiator, responder_psk, card_enc, card_mac, established=True),
    )


def _nonce(frame: UartFrame, counter: int) -> bytes:
    return bytes([frame.sender, frame.receiver, frame.command]) + struct.pack(">I", counter) + bytes(9)


def _mac_input(frame: UartFrame, ptype: int, counter: int, ciphertext: bytes) -> bytes:
    return bytes([frame.sender, frame.receiver, ptype, frame.command]) + struct.pack(">I", counter) + ciphertext


def wrap(session: SecureSession, frame: UartFrame) -> UartFrame:
    """
    Protège une trame : chiffre la charge utile, calcule le MAC et incrémente le compteur d'émission.

    :param session: La session de l'émetteur.
    :type session: SecureSession
    :param frame: La trame en clair.
    :type frame: UartFrame
    :return: La trame protégée (bit 0x80 du type).
    :rtype: UartFrame
    :raises NotEstablishedError: Si la session n'est pas établie.
    """
    if not session.established:
        raise NotEstablishedError(sender=frame.sender, receiver=frame.receiver)

    if session.tx_counter >= MAX_COUNTER:
        raise NotEstablishedError(sender=frame.sender, receiver=frame.receiver)

    counter = session.tx_counter + 1
    ptype = frame.ptype | WRAPPED_FLAG
    ciphertext = _ctr(session.enc_key, _nonce(frame, counter), frame.payload)
    mac = _cmac(session.mac_key, _mac_input(frame, ptype, counter, ciphertext))[:MAC_SIZE]
    session.tx_counter = counter

    return UartFrame(
        sender=frame.sender,
        receiver=frame.receiver,
        ptype=ptype,
        command=frame.command,
        payload=struct.pack(">I", counter) + ciphertext + mac,
    )


def unwrap(session: SecureSession, frame: UartFrame) -> UartFrame:
    """
    Vérifie et déchiffre une trame protégée : MAC, puis compteur strictement croissant, puis
    déchiffrement.

    :param session: La session du destinataire avec l'émetteur annoncé.
    :type session: SecureSession
    :param frame: La trame protégée.
    :type frame: UartFrame
    :return: La trame en clair.
    :rtype: UartFrame
    :raises NotEstablishedError: Si la session n'est pas établie.
    :raises MacFailureError: Si le MAC est invalide ou la trame trop courte.
    :raises ReplayDetectedError: Si le compteur a déjà été accepté.
    """
    if not session.established:
        raise NotEstablishedError(sender=frame.sender, receiver=frame.receiver)

    if not frame.wrapped or len(frame.payload) < WRAP_OVERHEAD:
        raise MacFailureError(sender=frame.sender, counter=0)

    (counter,) = struct.unpack(">I", frame.payload[:COUNTER_SIZE])
    ciphertext = frame.payload[COUNTER_SIZE:-MAC_SIZE]
    received_mac = frame.payload[-MAC_SIZE:]
    expected_mac = _cmac(session.mac_key, _mac_input(frame, frame.ptype, counter, ciphertext))[:MAC_SIZE]

    if not hmac.compare_digest(received_mac, expected_mac):
        raise MacFailureError(sender=frame.sender, counter=counter)

    if counter <= session.rx_counter:
        raise ReplayDetectedError(counter=counter, last_accepted=session.rx_counter)

    session.rx_counter = counter

    return UartFrame(
        sender=frame.sender,
        receiver=frame.receiver,
        ptype=frame.base_ptype,
        command=frame.command,
        payload=_ctr(session.enc_key, _nonce(frame, counter), ciphertext),
    )


@dataclass
class SecureChannelManager:
    """
    Sessions sécurisées des nœuds du bus, par paire (nœud local, nœud distant).
    """

    sessions: dict[tuple[int, int], SecureSession] = field(default_factory=dict)
    """Les extrémités de session indexées par (local, distant)."""

    def provision(
        self,
        initiator: int,
        responder: int,
        initiator_psk: bytes,
        responder_psk: bytes,
        host_challenge: bytes,
        card_challenge: bytes,
    ) -> None:
        """
        Établit et enregistre la session d'une paire de nœuds.

        :raises KeyMismatchError: Si les clés pré-partagées diffèrent.
        """
        local, remote = establish(
            initiator, responder, initiator_psk, responder_psk, host_challenge, card_challenge
        )
        self.sessions[(initiator, responder)] = local
        self.sessions[(responder, initiator)] = remote

    def session(self, local: int, peer: int) -> Optional[SecureSession]:
        return self.sessions.get((local, peer))

    def has_sessions(self, node: int) -> bool:
        """Indique si un nœud participe au canal sécurisé."""
        return any(local == node for local, _ in self.sessions)

    def wrap_from(self, origin: int, frame: UartFrame) -> UartFrame:
        """
        Protège une trame avec la session que possède réellement le nœud d'origine avec le destinataire.
        Le champ émetteur reste celui de la trame (éventuellement usurpé).

        :param origin: Le nœud qui émet physiquement la trame.
        :type origin: int
        :param frame: La trame en clair.
        :type frame: UartFrame
        :return: La trame protégée.
        :rtype: UartFrame
        :raises NotEstablishedError: Si le nœud d'origine n'a pas de session avec le destinataire.
        """
        session = self.session(origin, frame.receiver)

        if session is None:
            raise NotEstablishedError(sender=origin, receiver=frame.receiver)

        return wrap(session, frame)

    def unwrap_at(self, receiver: int, frame: UartFrame) -> UartFrame:
        """
        Vérifie une trame reçue avec la session du destinataire pour l'émetteur annoncé.

        :param receiver: Le nœud destinataire.
        :type receiver: int
        :param frame: La trame protégée.
        :type frame: UartFrame
        :return: La trame en clair.
        :rtype: UartFrame
        :raises NotEstablishedError: Si aucune session n'existe avec l'émetteur annoncé.
        """
        session = self.session(receiver, frame.sender)

        if session is None:
            raise NotEstablishedError(sender=frame.sender, receiver=receiver)

        return unwrap(session, frame)


SECURE_NODES: tuple[NodeId, ...] = (NodeId.BTS, NodeId.BCTRL, NodeId.DRV, NodeId.CHARGER)
"""Les nœuds légitimes du bus provisionnés avec des clés pré-partagées."""


def provision_channel(streams: RandomStreams, nodes: tuple[int, ...] = SECURE_NODES) -> SecureChannelManager:
    """
    Provisionne une session par paire de nœuds : clé pré-partagée d'usine et défis tirés des flux
    pseudo-aléatoires du scénario.

    :param streams: Les flux pseudo-aléatoires du scénario.
    :type streams: RandomStreams
    :param nodes: Les nœuds à relier.
    :type nodes: tuple[int, ...]
    :return: Le gestionnaire de sessions.
    :rtype: SecureChannelManager
    """
    manager = SecureChannelManager()

    for position, initiator in enumerate(nodes):
        for responder in nodes[position + 1 :]:
            pair = f"{initiator:02x}-{responder:02x}"
            psk = streams.random_bytes(f"psk:{pair}", KEY_SIZE)
            manager.provision(
                initiator,
                responder,
                psk,
                psk,
                streams.random_bytes(f"host-challenge:{pair}", CHALLENGE_SIZE),
                streams.random_bytes(f"card-challenge:{pair}", CHALLENGE_SIZE),
            )

    LOGGER.info(f"Canal sécurisé provisionné pour {len(manager.sessions) // 2} paires de nœuds.")

    return manager
