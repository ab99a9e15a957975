"""
Module de l'utilisateur scripté.

Ce module contient la victime simulée : présence (activité périodique), stationnement, tentatives
d'allumage et de déverrouillage, branchement du chargeur, réinitialisation d'usine et installation
d'images par l'application.
"""

from typing import Optional

from loguru import logger

from bus import Command, NodeId
from config import SimulationConfig, UserBehavior
from fwpipe import FirmwareImage
from simkern import EventKind, EventLog, PeriodicHandle, SimKernel

from .bts import BluetoothModule
from .charger import Charger
from .drv import MotorDriver
from .periph_models import PowerSwitch

LOGGER = logger.bind(name="BES-Simulation.Periph.User")

NODE_NAME: str = "USER"


class ScriptedUser:
    """
    Utilisateur scripté de la trottinette.
    """

    def __init__(
        self,
        kernel: SimKernel,
        event_log: EventLog,
        power: PowerSwitch,
        bts: BluetoothModule,
        drv: MotorDriver,
        charger: Charger,
        config: SimulationConfig,
        behavior: UserBehavior = UserBehavior.PRESENT,
    ) -> None:
        self.kernel = kernel
        self.event_log = event_log
        self.power = power
        self.bts = bts
        self.drv = drv
        self.charger = charger
        self.config = config
        self.behavior = behavior
        self.unlock_attempts = 0
        self.power_on_attempts = 0
        self._handles: list[PeriodicHandle] = []

    def start(self) -> None:
        """Allume la trottinette et, si l'utilisateur est présent, entretient son activité."""
        self.power.power_on(source="user")

        if self.behavior == UserBehavior.PRESENT:
            self._handles.append(
                self.kernel.every(self.config.timing.user_activity_ms, self.activity, label="user-activity")
            )

    def stop(self) -> None:
        for handle in self._handles:
            SimKernel.cancel(handle)

        self._handles.clear()

    def activity(self) -> None:
        if self.power.nodes_powered():
            self.drv.user_activity()

    def attempt_power_on(self) -> bool:
        self.power_on_attempts += 1

        return self.power.power_on(source="user")

    def retry_power_on(self, period_ms: int) -> None:
        """
        Tente d'allumer la trottinette périodiquement lorsqu'elle est éteinte.

        :param period_ms: La période des tentatives.
        :type period_ms: int
        """

        def attempt() -> None:
            if not self.power.nodes_powered():
                self.attempt_power_on()

        self._handles.append(self.kernel.every(period_ms, attempt, start=self.kernel.now + period_ms, label="user-power-on"))

    def attempt_unlock(self) -> bool:
        self.unlock_attempts += 1

        if not self.power.nodes_powered() and not self.attempt_power_on():
            return False

        return self.bts.send_app_command(NodeId.DRV, Command.UNLOCK_MOTOR)

    def retry_unlock(self, period_ms: int) -> None:
        """
        Tente de déverrouiller le moteur périodiquement depuis l'application.

        :param period_ms: La période des tentatives.
        :type period_ms: int
        """
        self._handles.append(
            self.kernel.every(period_ms, self.attempt_unlock, start=self.kernel.now + period_ms, label="user-unlock")
        )

    def connect_charger(self, voltage_mv: Optional[int] = None) -> None:
        self.charger.connect(voltage_mv)

    def factory_reset(self) -> None:
        """Réinitialisation d'usine depuis l'application, suivie d'un nouvel appairage."""
        if not self.power.nodes_powered():
            return

        self.bts.factory_reset()
        self.bts.pair()

    def pay(self, amount: str = "ransom") -> None:
        self.event_log.append(NODE_NAME, EventKind.PAYMENT, item=amount)
        LOGGER.info("La victime paie la rançon.")

    def send_unlock_code(self, code: bytes) -> bool:
        if not self.power.nodes_powered():
            self.attempt_power_on()

        return self.bts.send_app_command(NodeId.BCTRL, Command.FW_UNLOCK, code)

    def install_image(self, image: FirmwareImage) -> bool:
        if not self.power.nodes_powered():
            self.attempt_power_on()

        return self.bts.deliver_image(image)
