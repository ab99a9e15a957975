"""
Exceptions spécifiques au bus UART.

Ce module contient les exceptions du codec de trames et du canal sécurisé.
"""

from dataclasses import dataclass


class FrameError(Exception):
    """
    Classe de base des erreurs de décodage ou d'encodage d'une trame.
    """


class SecureChannelError(Exception):
    """
    Classe de base des erreurs du canal sécurisé.
    """


@dataclass(frozen=True)
class CrcMismatchError(FrameError):
    """
    Exception levée lorsque le CRC d'une trame ne correspond pas à son contenu.

    :param expected: Le CRC calculé.
    :type expected: int
    :param received: Le CRC reçu.
    :type received: int
    """

    expected: int
    """Le CRC calculé."""
    received: int
    """Le CRC reçu."""

    def __str__(self) -> str:
        return f"CRC invalide : 0x{self.received:04X} reçu, 0x{self.expected:04X} attendu."


@dataclass(frozen=True)
class TruncatedFrameError(FrameError):
    """
    Exception levée lorsqu'une trame est plus courte que sa longueur annoncée.

    :param length: La longueur reçue.
    :type length: int
    :param expected: La longueur attendue.
    :type expected: int
    """

    length: int
    """La longueur reçue."""
    expected: int
    """La longueur attendue."""

    def __str__(self) -> str:
        return f"Trame tronquée : {self.length} octets reçus, {self.expected} attendus."


@dataclass(frozen=True)
class OversizePayloadError(FrameError):
    """
    Exception levée lorsque la charge utile dépasse 64 octets.

    :param length: La longueur de la charge utile.
    :type length: int
    """

    length: int
    """La longueur de la charge utile."""

    def __str__(self) -> str:
        return f"Charge utile de {self.length} octets : le maximum est de 64 octets."


@dataclass(frozen=True)
class InvalidHeaderError(FrameError):
    """
    Exception levée lorsqu'une trame ne commence pas par l'en-tête 0x55 0xAA.

    :param header: Les deux premiers octets reçus.
    :type header: bytes
    """

    header: bytes
    """Les deux premiers octets reçus."""

    def __str__(self) -> str:
        return f"En-tête de trame invalide : {self.header.hex()}."


@dataclass(frozen=True)
class KeyMismatchError(SecureChannelError):
    """
    Exception levée lorsque les deux nœuds d'une session n'ont pas la même clé pré-partagée.

    :param initiator: Le nœud initiateur.
    :type initiator: int
    :param responder: Le nœud répondeur.
    :type responder: int
    """

    initiator: int
    """Le nœud initiateur."""
    responder: int
    """Le nœud répondeur."""

    def __str__(self) -> str:
        return (
            f"Cryptogramme invalide entre 0x{self.initiator:02X} et 0x{self.responder:02X} : "
            f"les clés pré-partagées diffèrent."
        )


@dataclass(frozen=True)
class MacFailureError(SecureChannelError):
    """
    Exception levée lorsque le code d'authentification d'une trame est invalide.

    :param sender: L'émetteur annoncé.
    :type sender: int
    :param counter: Le compteur de la trame.
    :type counter: int
    """

    sender: int
    """L'émetteur annoncé."""
    counter: int
    """Le compteur de la trame."""

    def __str__(self) -> str:
        return f"MAC invalide pour la trame {self.counter} de 0x{self.sender:02X}."


@dataclass(frozen=True)
class ReplayDetectedError(SecureChannelError):
    """
    Exception levée lorsqu'un compteur déjà accepté est présenté de nouveau.

    :param counter: Le compteur reçu.
    :type counter: int
    :param last_accepted: Le dernier compteur accepté.
    :type last_accepted: int
    """

    counter: int
    """Le compteur reçu."""
    last_accepted: int
    """Le dernier compteur accepté."""

    def __str__(self) -> str:
        return f"Rejeu détecté : compteur {self.counter} <= dernier compteur accepté {self.last_accepted}."


@dataclass(frozen=True)
class NotEstablishedError(SecureChannelError):
    """
    Exception levée lorsqu'aucune session n'est établie entre deux nœuds.

    :param sender: L'émetteur.
    :type sender: int
    :param receiver: Le destinataire.
    :type receiver: int
    """

    sender: int
    """L'émetteur."""
    receiver: int
    """Le destinataire."""

    def __str__(self) -> str:
        return f"Aucune session sécurisée établie entre 0x{self.sender:02X} et 0x{self.receiver:02X}."
