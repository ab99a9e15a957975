"""
Module du chargeur.

Ce module contient le chargeur externe : il signale sa présence au BCTRL par une trame périodique et
fournit un courant constant jusqu'à une tension cible par cellule.
"""

from typing import Optional

from loguru import logger

from battery import BatteryMonitor
from bus import Command, NodeId, PacketType, UartBus, UartFrame
from config import SimulationConfig
from simkern import EventKind, EventLog, PeriodicHandle, SimKernel

LOGGER = logger.bind(name="BES-Simulation.Periph.Charger")

NODE_NAME: str = "CHARGER"


class Charger:
    """
    Chargeur à courant constant raccordé au bus UART.
    """

    def __init__(self, kernel: SimKernel, event_log: EventLog, bus: UartBus, bmon: BatteryMonitor, config: SimulationConfig) -> None:
        self.kernel = kernel
        self.event_log = event_log
        self.bus = bus
        self.bmon = bmon
        self.voltage_mv: int = config.battery.charger_voltage_mv
        self.current_ma: float = config.battery.charger_current_ma
        self.status_interval_ms: int = config.kernel.status_interval_ms
        self.connected = False
        self._handle: Optional[PeriodicHandle] = None
        bus.attach(NodeId.CHARGER, self.on_frame, lambda: self.connected)

    @property
    def target_cell_mv(self) -> float:
        """La tension cible par cellule (tension du chargeur divisée par 10)."""
        return self.voltage_mv / 10

    def on_frame(self, frame: UartFrame) -> None:
        LOGGER.debug("Trame 0x{:02X} ignorée par le chargeur.", frame.command)

    def _announce(self) -> None:
        frame = UartFrame(
            sender=NodeId.CHARGER,
            receiver=NodeId.BCTRL,
            ptype=PacketType.NOTIFY,
            command=Command.CHARGER_STATUS,
            payload=min(self.voltage_mv, 0xFFFF).to_bytes(2, "big"),
        )
        self.bus.send(NodeId.CHARGER, frame)

    def connect(self, voltage_mv: Optional[int] = None) -> None:
        """
        Branche le chargeur. Le branchement est un signal de démarrage qui sort le BMON du mode SHIP.

        :param voltage_mv: La tension du chargeur, celle de la configuration si absente.
        :type voltage_mv: Optional[int]
        """
        if self.connected:
            return

        if voltage_mv is not None:
            self.voltage_mv = voltage_mv

        self.connected = True
        self.event_log.append(NODE_NAME, EventKind.CHARGER, connected=True, voltage_mv=self.voltage_mv)
        LOGGER.info(f"Chargeur {self.voltage_mv} mV branché.")
        self.bmon.boot_signal()
        self._announce()
        self._handle = self.kernel.every(
            self.status_interval_ms,
            self._announce,
            start=self.kernel.now + self.status_interval_ms,
            label="charger-status",
        )

    def disconnect(self) -> None:
        if not self.connected:
            return

        SimKernel.cancel(self._handle)
        self._handle = None
        self.connected = False
        self.event_log.append(NODE_NAME, EventKind.CHARGER, connected=False)
