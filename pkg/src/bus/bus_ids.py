"""
Ce module contient les identifiants du bus UART : codes des nœuds, types de paquets, commandes et
rôles autorisés par commande.
"""

from enum import IntEnum


class NodeId(IntEnum):
    """
    Codes des nœuds du bus UART.
    """

    BTS = 0x20
    BCTRL = 0x22
    DRV = 0x23
    CHARGER = 0x24
    EXTERNAL = 0x3D


class PacketType(IntEnum):
    """
    Types de paquets.
    """

    READ = 0x01
    WRITE = 0x02
    NOTIFY = 0x03
    UPDATE_CTL = 0x04


WRAPPED_FLAG: int = 0x80
"""Bit du type de paquet indiquant une trame protégée par le canal sécurisé."""


class Command(IntEnum):
    """
    Commandes du protocole.
    """

    UPDATE_START = 0x07
    UPDATE_CHUNK = 0x08
    UPDATE_VERIFY = 0x09
    UPDATE_FINALIZE = 0x0A
    DRV_ID = 0x10
    PASSWORD_HASH = 0x17
    MILEAGE = 0x29
    LAST_TRAVEL_KM = 0x2A
    AVG_SPEED = 0x2B
    LAST_TRAVEL_MIN = 0x2C
    BATT_LEVEL = 0x32
    CELL_VOLTAGES = 0x40
    BLE_ADVERT = 0x50
    CHARGER_STATUS = 0x60
    LOCK = 0x70
    UNLOCK_MOTOR = 0x71
    RESET = 0x72
    FACTORY_RESET = 0x73
    POWER_OFF = 0x79
    RAISE_ERROR = 0x7B
    LIGHTS_ON = 0x7C
    FW_UNLOCK = 0xEE
    FLOOD = 0xFF


UPDATE_COMMANDS: frozenset[int] = frozenset(
    {Command.UPDATE_START, Command.UPDATE_CHUNK, Command.UPDATE_VERIFY, Command.UPDATE_FINALIZE}
)
"""Les commandes de mise à jour du micrologiciel."""

DRV_DATA_READS: frozenset[int] = frozenset(
    {
        Command.DRV_ID,
        Command.PASSWORD_HASH,
        Command.MILEAGE,
        Command.LAST_TRAVEL_KM,
        Command.AVG_SPEED,
        Command.LAST_TRAVEL_MIN,
    }
)
"""Les champs du DRV lisibles uniquement par le BTS."""

DRV_BTS_WRITES: frozenset[int] = frozenset(
    {
        Command.LOCK,
        Command.UNLOCK_MOTOR,
        Command.RESET,
        Command.FACTORY_RESET,
        Command.RAISE_ERROR,
        Command.LIGHTS_ON,
    }
)
"""Les commandes du DRV acceptées uniquement du BTS."""

COMMAND_ACL: dict[tuple[NodeId, int], frozenset[NodeId]] = {
    **{(NodeId.DRV, command): frozenset({NodeId.BTS}) for command in DRV_DATA_READS | DRV_BTS_WRITES},
    (NodeId.DRV, Command.POWER_OFF): frozenset({NodeId.BCTRL, NodeId.BTS}),
    (NodeId.BTS, Command.BLE_ADVERT): frozenset({NodeId.DRV}),
    (NodeId.BTS, Command.POWER_OFF): frozenset({NodeId.BCTRL, NodeId.DRV}),
    **{(NodeId.BCTRL, command): frozenset({NodeId.BTS}) for command in UPDATE_COMMANDS | {Command.FW_UNLOCK}},
    (NodeId.BCTRL, Command.CHARGER_STATUS): frozenset({NodeId.CHARGER}),
}
"""Les émetteurs autorisés par (destinataire, commande); une commande absente est ouverte à tous."""


def is_allowed(receiver: int, sender: int, command: int) -> bool:
    """
    Indique si l'émetteur annoncé a le rôle requis pour la commande.

    :param receiver: Le destinataire.
    :type receiver: int
    :param sender: L'émetteur annoncé.
    :type sender: int
    :param command: La commande.
    :type command: int
    :return: Vrai si la commande est autorisée.
    :rtype: bool
    """
    allowed = COMMAND_ACL.get((receiver, command))

    return allowed is None or sender in allowed


def node_name(code: int) -> str:
    """
    Retourne le nom d'un nœud, ou son code hexadécimal s'il est inconnu.

    :param code: Le code du nœud.
    :type code: int
    :return: Le nom.
    :rtype: str
    """
    try:
        return NodeId(code).name
    except ValueError:
        return f"0x{code:02X}"
