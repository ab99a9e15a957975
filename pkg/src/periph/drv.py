"""
Module du contrôleur moteur (DRV).

Ce module contient le nœud DRV : données d'identification et d'usage, réponses aux lectures, interrogation
périodique du BCTRL (erreur 21), vérification de la tension d'alimentation (erreur 24), erreurs forgées,
antivol, réinitialisations, extinction automatique et mises à jour de son micrologiciel.
"""

from collections import deque
from typing import Optional

from loguru import logger

from battery import BatteryPack
from bctrl import FirmwareReceiver
from bus import Command, NodeId, PacketType, UartBus, UartFrame, node_name
from bus.bus_ids import DRV_DATA_READS, UPDATE_COMMANDS
from config import Profile, ProfileConfig, SimulationConfig
from fwpipe import FirmwareImage, FirmwareTarget, KeyMaterial, SigningPolicy, verify_and_install
from simkern import EventHandle, EventKind, EventLog, PeriodicHandle, SimKernel

from .exception_periph import UnknownFieldError
from .periph_models import DrvState, ErrorCode, LockState, PowerSwitch

LOGGER = logger.bind(name="BES-Simulation.Periph.Drv")

NODE_NAME: str = "DRV"


class MotorDriver:
    """
    Nœud DRV.
    """

    def __init__(
        self,
        kernel: SimKernel,
        event_log: EventLog,
        bus: UartBus,
        power: PowerSwitch,
        pack: BatteryPack,
        profile: Profile,
        config: SimulationConfig,
        state: DrvState,
        keys: KeyMaterial,
        policy: SigningPolicy,
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
        :param pack: Le pack dont le DRV mesure la tension.
        :type pack: BatteryPack
        :param profile: Le profil de la trottinette.
        :type profile: Profile
        :param config: La configuration de la simulation.
        :type config: SimulationConfig
        :param state: L'état initial.
        :type state: DrvState
        :param keys: Les clés embarquées dans le DRV.
        :type keys: KeyMaterial
        :param policy: La politique de signature du scénario.
        :type policy: SigningPolicy
        """
        self.kernel = kernel
        self.event_log = event_log
        self.bus = bus
        self.power = power
        self.pack = pack
        self.profile = profile
        self.profile_config: ProfileConfig = config.profile(profile)
        self.config = config
        self.timing = config.timing
        self.state = state
        self.keys = keys
        self.policy = policy
        self.receiver = FirmwareReceiver(NodeId.DRV, FirmwareTarget.DRV, event_log)

        self.last_bms_reply_ms = 0
        self.last_poll_ms: Optional[int] = None
        self.last_activity_ms = 0
        self.rideable_ms = 0
        self.power_cycles = 0
        self._reset_times: deque[int] = deque()
        self._loop_flagged = False
        self._power_off_handle: Optional[EventHandle] = None
        self._beep_handle: Optional[PeriodicHandle] = None

        bus.attach(NodeId.DRV, self.on_frame, power.nodes_powered)
        power.on_power_on.append(self.on_power_on)
        power.on_power_off.append(self.on_power_off)

    @property
    def powered(self) -> bool:
        return self.power.nodes_powered()

    def load_ma(self) -> float:
        """
        Retourne la charge imposée au pack par la trottinette allumée (feux compris).

        :return: Le courant en mA.
        :rtype: float
        """
        if not self.powered:
            return 0.0

        extra = self.profile_config.fbd_load_ma if self.state.lights_on else 0.0

        return self.profile_config.idle_load_ma + extra

    def send_frame(self, receiver: int, ptype: PacketType, command: Command, payload: bytes = b"") -> bool:
        frame = UartFrame(sender=NodeId.DRV, receiver=receiver, ptype=ptype, command=command, payload=payload)

        return self.bus.send(NodeId.DRV, frame)

    # Alimentation

    def on_power_on(self) -> None:
        now = self.kernel.now
        self.last_bms_reply_ms = now
        self.last_activity_ms = now
        self.last_poll_ms = None
        self.clear_error()

    def on_power_off(self) -> None:
        SimKernel.cancel(self._power_off_handle)
        self._power_off_handle = None
        self.clear_error()
        self.state.lights_on = False

    def user_activity(self) -> None:
        """Activité de l'utilisateur présent : repousse l'extinction automatique."""
        self.last_activity_ms = self.kernel.now

    # Boucle

    def motor_voltage(self) -> float:
        """
        Tension d'alimentation mesurée : tension du groupe vivant le plus faible moins la chute dans sa
        résistance interne.
        """
        sag = self.load_ma() * self.config.battery.internal_resistance_mohm / 1000.0

        return max(self.pack.min_live_voltage() - sag, 0.0)

    def tick(self, dt_ms: int) -> None:
        """
        Itération du DRV : mesure de la tension, interrogation du BCTRL, délais d'erreur et d'extinction.

        :param dt_ms: La durée de l'itération.
        :type dt_ms: int
        """
        if not self.powered:
            return

        now = self.kernel.now
        self.state.motor_voltage_mv = self.motor_voltage()

        if self.profile_config.drv_check_active:
            self.drv_voltage_check()

        if self.last_poll_ms is None or now - self.last_poll_ms >= self.timing.drv_poll_ms:
            self.last_poll_ms = now
            self.send_frame(NodeId.BCTRL, PacketType.READ, Command.BATT_LEVEL)

        if self.state.error_state is None and now - self.last_bms_reply_ms >= self.timing.bms_timeout_ms:
            self.raise_error(ErrorCode.E21, source="timeout")

        if not self.powered:
            return

        if not self.state.locked and now - self.last_activity_ms >= self.timing.auto_off_ms:
            self.power.power_off(reason="auto-off")
            return

        if not self.state.locked and self.state.error_state is None:
            self.rideable_ms += dt_ms

    def drv_voltage_check(self) -> Optional[ErrorCode]:
        """
        Lève l'erreur 24 lorsque la tension mesurée passe strictement sous cUVT.

        :return: L'erreur levée, sinon None.
        :rtype: Optional[ErrorCode]
        """
        if self.state.error_state == ErrorCode.E24:
            return None

        if self.state.motor_voltage_mv < self.pack.thresholds.c_uvt:
            self.raise_error(ErrorCode.E24, source="voltage-check", motor_voltage_mv=round(self.state.motor_voltage_mv))
            return ErrorCode.E24

        return None

    # Erreurs

    def raise_error(self, code: ErrorCode, source: str, **detail) -> None:
        """
        Lève une erreur : E21 et E24 éteignent la trottinette après le délai d'extinction, E23 déclenche
        des bips périodiques.

        :param code: Le code d'erreur.
        :type code: ErrorCode
        :param source: L'origine de l'erreur.
        :type source: str
        """
        if self.state.error_state == code:
            return

        now = self.kernel.now
        self.state.error_state = code
        self.state.error_timer = now
        self.event_log.append(
            NODE_NAME, EventKind.ERROR_RAISED, code=f"E{int(code)}", description=code.description, source=source, **detail
        )
        LOGGER.info(f"Erreur {int(code)} ({code.description}) levée par le DRV.")

        if code.powers_off:
            SimKernel.cancel(self._power_off_handle)
            self._power_off_handle = self.kernel.schedule_in(
                self.timing.error_power_off_ms,
                lambda: self.power.power_off(reason=f"E{int(code)}"),
                label="drv-error-off",
            )
        elif code == ErrorCode.E23 and self._beep_handle is None:
            self._beep_handle = self.kernel.every(self.timing.beep_interval_ms, self._beep, label="drv-beep")

    def _beep(self) -> None:
        if self.powered:
            self.event_log.append(NODE_NAME, EventKind.BEEP)

    def clear_error(self) -> None:
        SimKernel.cancel(self._beep_handle)
        self._beep_handle = None
        self.state.error_state = None
        self.state.error_timer = None

    # Réception

    def on_frame(self, frame: UartFrame) -> None:
        if frame.command in UPDATE_COMMANDS:
            image = self.receiver.handle(frame)

            if image is not None:
                self.install(image)
            return

        if frame.command in DRV_DATA_READS and frame.ptype == PacketType.READ:
            self.handle_read_command(frame)
            return

        match frame.command:
            case Command.BATT_LEVEL if frame.ptype == PacketType.NOTIFY:
                self.last_bms_reply_ms = self.kernel.now
            case Command.LOCK:
                self.lock()
            case Command.UNLOCK_MOTOR:
                self.unlock()
            case Command.RESET:
                self.reset()
            case Command.FACTORY_RESET:
                self.factory_reset()
            case Command.POWER_OFF:
                self.power.power_off(reason=f"command:{node_name(frame.sender)}")
            case Command.RAISE_ERROR if frame.payload:
                self.handle_error_frame(frame.payload[0])
            case Command.LIGHTS_ON:
                self.state.lights_on = not frame.payload or frame.payload[0] != 0
            case _:
                LOGGER.debug("Trame 0x{:02X} de {} ignorée par le DRV.", frame.command, node_name(frame.sender))

    def handle_read_command(self, frame: UartFrame) -> Optional[bytes]:
        """
        Répond à une lecture par le champ demandé, adressé à l'émetteur annoncé.

        :param frame: La lecture.
        :type frame: UartFrame
        :return: Les données envoyées, None pour un champ inconnu.
        :rtype: Optional[bytes]
        """
        try:
            value = self.state.read_field(frame.command)
        except UnknownFieldError as error:
            LOGGER.debug(str(error))
            return None

        self.send_frame(frame.sender, PacketType.NOTIFY, Command(frame.command), value)

        return value

    def handle_error_frame(self, code: int) -> None:
        try:
            error = ErrorCode(code)
        except ValueError:
            LOGGER.warning(f"Code d'erreur {code} inconnu.")
            return

        self.raise_error(error, source="command")

    def lock(self) -> None:
        if self.state.locked:
            return

        self.state.lock_state = LockState.LOCKED
        self.event_log.append(NODE_NAME, EventKind.LOCK, locked=True)

    def unlock(self) -> None:
        if not self.state.locked:
            return

        self.state.lock_state = LockState.UNLOCKED
        self.last_activity_ms = self.kernel.now
        self.event_log.append(NODE_NAME, EventKind.LOCK, locked=False)

    def reset(self) -> None:
        """
        Réinitialisation : cycle d'alimentation. Trois cycles dans la fenêtre signalent une boucle de
        redémarrages. L'antivol est conservé.
        """
        now = self.kernel.now
        self._reset_times.append(now)

        while self._reset_times and now - self._reset_times[0] > self.timing.power_cycle_window_ms:
            self._reset_times.popleft()

        self.power_cycles += 1
        self.event_log.append(NODE_NAME, EventKind.REBOOT, reason="reset")

        if len(self._reset_times) >= self.timing.power_cycle_threshold and not self._loop_flagged:
            self._loop_flagged = True
            self.event_log.append(NODE_NAME, EventKind.POWER_CYCLE_LOOP, resets=len(self._reset_times))
            LOGGER.warning("Boucle de redémarrages détectée sur le DRV.")

        self.power.power_off(reason="reset")
        self.power.power_on(source="reset")

    def factory_reset(self) -> None:
        """Réinitialisation d'usine : le numéro de série et le kilométrage sont conservés."""
        self.state.lock_state = LockState.UNLOCKED
        self.state.lights_on = False
        self.clear_error()
        self.event_log.append(NODE_NAME, EventKind.FACTORY_RESET, drv_id=self.state.drv_id.hex())

    def install(self, image: FirmwareImage) -> bool:
        """
        Vérifie et installe une image DRV selon la politique du profil.

        :param image: L'image reçue.
        :type image: FirmwareImage
        :return: Vrai si l'image est installée.
        :rtype: bool
        """
        rule = self.policy.effective(self.profile, FirmwareTarget.DRV, self.state.version)
        decision = verify_and_install(image, rule, self.keys, expected_target=FirmwareTarget.DRV)
        self.receiver.complete(accepted=decision.accepted)

        if not decision.accepted:
            self.event_log.append(NODE_NAME, EventKind.INSTALL_REJECTED, version=image.version, reason=str(decision.reason))
            return False

        self.state.version = image.version
        self.event_log.append(NODE_NAME, EventKind.INSTALL_ACCEPTED, version=image.version)
        self.event_log.append(NODE_NAME, EventKind.REBOOT, reason="update")
        LOGGER.info(f"Micrologiciel DRV {image.version} installé.")

        return True
