"""
Module du module Bluetooth (BTS).

Ce module contient le nœud BTS : annonce BLE du nom de la trottinette, changement de nom suivi d'un
redémarrage, relais des commandes de l'application et livraison des images de micrologiciel aux autres
nœuds par fragments.
"""

from typing import Optional

from loguru import logger

from bus import Command, NodeId, PacketType, UartBus, UartFrame, node_name
from config import SimulationConfig
from fwpipe import FirmwareImage, FirmwareTarget
from simkern import EventHandle, EventKind, EventLog, SimKernel

from bctrl import update_frames

from .periph_models import MAX_NAME_SIZE, BtsState, PowerSwitch
from .sniffer import Sniffer

LOGGER = logger.bind(name="BES-Simulation.Periph.Bts")

NODE_NAME: str = "BTS"

TARGET_NODES: dict[FirmwareTarget, NodeId] = {
    FirmwareTarget.BCTRL: NodeId.BCTRL,
    FirmwareTarget.DRV: NodeId.DRV,
}


class BluetoothModule:
    """
    Nœud BTS.
    """

    def __init__(
        self,
        kernel: SimKernel,
        event_log: EventLog,
        bus: UartBus,
        power: PowerSwitch,
        config: SimulationConfig,
        state: BtsState,
        sniffer: Sniffer,
    ) -> None:
        """
        :param kernel: Le noyau de simulation.
        :type kernel: SimKernel
        :param event_log: Le journal d'événements.
        :type event_log: EventLog
        :param bus: Le bus UART.
        :type bus: UartBus
        :param power: L'interrupteur d'alimentation.
        :type power: PowerSwitch
        :param config: La configuration de la simulation.
        :type config: SimulationConfig
        :param state: L'état initial.
        :type state: BtsState
        :param sniffer: Le renifleur qui observe les annonces.
        :type sniffer: Sniffer
        """
        self.kernel = kernel
        self.event_log = event_log
        self.bus = bus
        self.power = power
        self.config = config
        self.state = state
        self.sniffer = sniffer
        self.reboots = 0
        self._reboot_handle: Optional[EventHandle] = None
        self._delivery: list[EventHandle] = []

        bus.attach(NodeId.BTS, self.on_frame, power.nodes_powered)
        power.on_power_on.append(self.on_power_on)
        power.on_power_off.append(self.on_power_off)

    def send_frame(self, receiver: int, ptype: PacketType, command: Command, payload: bytes = b"") -> bool:
        frame = UartFrame(sender=NodeId.BTS, receiver=receiver, ptype=ptype, command=command, payload=payload)

        return self.bus.send(NodeId.BTS, frame)

    # Alimentation et annonces

    def on_power_on(self) -> None:
        """Démarrage : annonce du nom courant et lecture du numéro de série DRV."""
        self.start_advertising()
        self.send_frame(NodeId.DRV, PacketType.READ, Command.DRV_ID)

    def on_power_off(self) -> None:
        self.state.advertising = False
        SimKernel.cancel(self._reboot_handle)
        self._reboot_handle = None

        for handle in self._delivery:
            SimKernel.cancel(handle)

        self._delivery.clear()

    def start_advertising(self) -> None:
        if not self.power.nodes_powered():
            return

        self.state.advertising = True
        self.sniffer.observe(self.kernel.now, self.state.ble_name)

    def ble_set_name(self, name: bytes) -> None:
        """
        Remplace le nom annoncé puis redémarre; le nouveau nom est annoncé à la fin du redémarrage. Un nom
        trop long est tronqué à 14 octets.

        :param name: Le nouveau nom.
        :type name: bytes
        """
        if len(name) > MAX_NAME_SIZE:
            self.event_log.append(NODE_NAME, EventKind.WARNING, reason="name-truncated", length=len(name))
            LOGGER.warning(f"Nom BLE de {len(name)} octets tronqué à {MAX_NAME_SIZE} octets.")
            name = name[:MAX_NAME_SIZE]

        self.state.ble_name = bytes(name)
        self.event_log.append(NODE_NAME, EventKind.ADVERT_CHANGED, name=name.hex())
        self.reboot(reason="name-change")

    def reboot(self, reason: str) -> None:
        self.reboots += 1
        self.state.advertising = False
        self.event_log.append(NODE_NAME, EventKind.REBOOT, reason=reason)
        SimKernel.cancel(self._reboot_handle)
        self._reboot_handle = self.kernel.schedule_in(
            self.config.timing.bts_reboot_ms, self.start_advertising, label="bts-reboot"
        )

    # Réception

    def on_frame(self, frame: UartFrame) -> None:
        match frame.command:
            case Command.BLE_ADVERT:
                self.ble_set_name(frame.payload)
            case Command.DRV_ID if frame.ptype == PacketType.NOTIFY:
                self.state.drv_serial = frame.payload
            case Command.BATT_LEVEL if frame.ptype == PacketType.NOTIFY and frame.payload:
                self.state.batt_level = frame.payload[0]
            case Command.POWER_OFF:
                self.power.power_off(reason=f"command:{node_name(frame.sender)}")
            case _:
                LOGGER.debug("Trame 0x{:02X} de {} ignorée par le BTS.", frame.command, node_name(frame.sender))

    # Application

    def send_app_command(self, receiver: int, command: Command, payload: bytes = b"") -> bool:
        """
        Relaie une commande de l'application appairée.

        :param receiver: Le nœud destinataire.
        :type receiver: int
        :param command: La commande.
        :type command: Command
        :param payload: Les données.
        :type payload: bytes
        :return: Vrai si la trame a été placée sur le bus.
        :rtype: bool
        """
        return self.send_frame(receiver, PacketType.WRITE, command, payload)

    def pair(self) -> None:
        if self.state.paired:
            return

        self.state.paired = True
        self.event_log.append(NODE_NAME, EventKind.PAIRING, paired=True)

    def factory_reset(self) -> None:
        """
        Réinitialisation d'usine demandée par l'application : nom d'usine, appairage effacé, puis
        réinitialisation du DRV et redémarrage.
        """
        self.event_log.append(NODE_NAME, EventKind.FACTORY_RESET)
        self.state.paired = False
        self.event_log.append(NODE_NAME, EventKind.PAIRING, paired=False)
        self.state.ble_name = self.state.default_name
        self.send_app_command(NodeId.DRV, Command.FACTORY_RESET)
        self.reboot(reason="factory-reset")

    def deliver_image(self, image: FirmwareImage) -> bool:
        """
        Livre une image à son nœud cible en trames UpdateCtl espacées.

        :param image: L'image.
        :type image: FirmwareImage
        :return: Faux si la cible n'est pas joignable par le BTS.
        :rtype: bool
        """
        receiver = TARGET_NODES.get(image.target)

        if receiver is None or not self.power.nodes_powered():
            LOGGER.warning(f"Livraison de l'image {image.target.name} impossible.")
            return False

        frames = update_frames(
            NodeId.BTS, receiver, image.target, image.to_bytes(), chunk_size=self.config.bus.chunk_size
        )
        spacing = self.config.bus.chunk_spacing_ms
        LOGGER.info(f"Livraison de l'image {image.target.name} {image.version} en {len(frames)} trames.")
        self._delivery = [
            self.kernel.schedule_in(index * spacing, lambda frame=frame: self.bus.send(NodeId.BTS, frame), "bts-update")
            for index, frame in enumerate(frames)
        ]

        return True
