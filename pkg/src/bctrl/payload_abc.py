"""
Module permettant de définir une classe abstraite pour les programmes malveillants du BCTRL.

Ce module contient l'interface entre le micrologiciel BCTRL installé et le programme malveillant qu'il
embarque : crochets de démarrage, d'itération et de réception, et vérification des capacités exigées
par chaque étape.
"""

from abc import ABC
from typing import TYPE_CHECKING, Callable, ClassVar, Optional

from loguru import logger

from bus import UartFrame
from simkern import EventKind

from .bctrl_models import BctrlFirmware, Capability, PayloadKind

if TYPE_CHECKING:
    from .controller import BatteryController

LOGGER = logger.bind(name="BES-Simulation.Bctrl.Payload.ABC")


class MaliciousPayload(ABC):
    """
    Classe abstraite pour les programmes malveillants exécutés par le micrologiciel BCTRL.
    """

    kind: ClassVar[PayloadKind] = PayloadKind.NONE
    """Le programme implémenté."""
    steps: ClassVar[dict[str, frozenset[Capability]]] = {}
    """Les capacités exigées par étape."""

    def __init__(self, controller: "BatteryController") -> None:
        """
        :param controller: Le contrôleur qui exécute le programme.
        :type controller: BatteryController
        """
        self.controller = controller
        self.failed_steps: list[str] = []

    @property
    def firmware(self) -> BctrlFirmware:
        return self.controller.state.firmware

    def missing(self, step: str) -> list[Capability]:
        """
        Retourne les capacités d'une étape absentes du micrologiciel installé.

        :param step: Le nom de l'étape.
        :type step: str
        :return: Les capacités absentes, dans l'ordre canonique.
        :rtype: list[Capability]
        """
        required = self.steps.get(step, frozenset())

        return [capability for capability in Capability if capability in required and not self.firmware.patch_set.has(capability)]

    def require(self, step: str) -> bool:
        """
        Vérifie qu'une étape peut s'exécuter. Une étape impossible est journalisée une seule fois.

        :param step: Le nom de l'étape.
        :type step: str
        :return: Vrai si toutes les capacités de l'étape sont présentes.
        :rtype: bool
        """
        absent = self.missing(step)

        if not absent:
            return True

        if step not in self.failed_steps:
            self.failed_steps.append(step)
            self.controller.event_log.append(
                "BCTRL",
                EventKind.ATTACK_PHASE,
                phase="step-failed",
                step=step,
                missing=[str(capability) for capability in absent],
            )
            LOGGER.warning(f"Étape '{step}' impossible : capacités absentes {[str(c) for c in absent]}.")

        return False

    def log_phase(self, phase: str, **detail) -> None:
        self.controller.event_log.append("BCTRL", EventKind.ATTACK_PHASE, phase=phase, **detail)

    def on_boot(self) -> None:
        """Appelé à la fin de chaque démarrage du micrologiciel."""

    def on_tick(self, now: int) -> None:
        """Appelé à chaque itération de la boucle principale."""

    def intercept(self, frame: UartFrame) -> bool:
        """
        Appelé avant le traitement d'une trame adressée au BCTRL.

        :param frame: La trame reçue.
        :type frame: UartFrame
        :return: Vrai si la trame doit être ignorée.
        :rtype: bool
        """
        return False

    @property
    def blocks_i2c(self) -> bool:
        """Indique que le programme suspend la lecture des registres du BMON."""
        return False

    def on_stop(self) -> None:
        """Appelé lorsque le micrologiciel est remplacé."""


PayloadFactory = Callable[[BctrlFirmware, "BatteryController"], Optional[MaliciousPayload]]
"""Construit le programme d'un micrologiciel, None pour un micrologiciel sans programme."""
