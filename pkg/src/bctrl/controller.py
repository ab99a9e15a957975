"""
Module du contrôleur de batterie (BCTRL).

Ce module contient le micrologiciel BCTRL : initialisation du BMON, boucle principale (lecture des
tensions, équilibrage, protections, veille), contrôle de la charge, réception des mises à jour avec le
verrou DFU et primitives d'usurpation offertes aux programmes malveillants.
"""

from typing import Callable, Optional

from loguru import logger

from battery import BatteryMonitor, FaultFlags, I2cMessage, I2cTimeoutError, Register, Thresholds, compute_batt_level
from battery.bmon import CELLBAL_BITS, CELLBAL_REGISTERS
from bus import Command, NodeId, PacketType, UartBus, UartFrame
from bus.bus_ids import UPDATE_COMMANDS
from config import Profile, SimulationConfig
from fwpipe import FirmwareImage, FirmwareTarget, InstallDecision, KeyMaterial, RejectReason, SigningPolicy
from fwpipe import verify_and_install
from simkern import EventHandle, EventKind, EventLog, SimKernel

from .bctrl_models import (
    BctrlFirmware,
    BctrlState,
    Capability,
    CellSummary,
    MainLoopBranches,
    decode_firmware_body,
    evaluate_branches,
)
from .exception_bctrl import BmonUnreachableError, CapabilityUnavailableError, FirmwareBodyError
from .firmware_receiver import FirmwareReceiver
from .payload_abc import MaliciousPayload, PayloadFactory

LOGGER = logger.bind(name="BES-Simulation.Bctrl.Controller")

NODE_NAME: str = "BCTRL"

ResponseCallback = Callable[[Optional[bytes]], None]


class BatteryController:
    """
    Nœud BCTRL : micrologiciel installé, état d'exécution et raccordement aux bus UART et I2C.
    """

    def __init__(
        self,
        kernel: SimKernel,
        event_log: EventLog,
        bus: UartBus,
        bmon: BatteryMonitor,
        keys: KeyMaterial,
        policy: SigningPolicy,
        profile: Profile,
        config: SimulationConfig,
        firmware: BctrlFirmware,
        serial: bytes,
        payload_factory: Optional[PayloadFactory] = None,
    ) -> None:
        """
        :param kernel: Le noyau de simulation.
        :type kernel: SimKernel
        :param event_log: Le journal d'événements.
        :type event_log: EventLog
        :param bus: Le bus UART.
        :type bus: UartBus
        :param bmon: Le moniteur de batterie (esclave I2C).
        :type bmon: BatteryMonitor
        :param keys: Les clés embarquées dans le BCTRL.
        :type keys: KeyMaterial
        :param policy: La politique de signature du scénario.
        :type policy: SigningPolicy
        :param profile: Le profil de la trottinette.
        :type profile: Profile
        :param config: La configuration de la simulation.
        :type config: SimulationConfig
        :param firmware: Le micrologiciel installé au départ.
        :type firmware: BctrlFirmware
        :param serial: Le numéro de série du BCTRL.
        :type serial: bytes
        :param payload_factory: Le constructeur des programmes malveillants.
        :type payload_factory: Optional[PayloadFactory]
        """
        self.kernel = kernel
        self.event_log = event_log
        self.bus = bus
        self.bmon = bmon
        self.keys = keys
        self.policy = policy
        self.profile = profile
        self.config = config
        self.state = BctrlState(serial=serial, firmware=firmware, thresholds=bmon.pack.thresholds)
        self.receiver = FirmwareReceiver(NodeId.BCTRL, FirmwareTarget.BCTRL, event_log)
        self.payload_factory = payload_factory
        self.payload: Optional[MaliciousPayload] = None

        self.summary = CellSummary.from_voltages([], batt_level=0)
        self.branches = MainLoopBranches()
        self.faults = FaultFlags()
        self.reported_voltages: list[int] = []
        self.charging = False
        self.sleep_count = 0
        self.last_rx_ms = 0
        self.charger_seen_ms: Optional[int] = None
        self._charge_refused = False
        self._protect_latched = False
        self._next_status_ms = 0

        self._load_payload()
        bus.attach(NodeId.BCTRL, self.on_frame, self.powered)

    @property
    def thresholds(self) -> Thresholds:
        return self.state.thresholds

    def powered(self) -> bool:
        """Le BCTRL est alimenté tant que le BMON n'est pas en mode SHIP."""
        return not self.bmon.ship_mode

    @property
    def awake(self) -> bool:
        return self.state.booted and not self.state.sleep_mode

    def current_ma(self) -> float:
        """
        Retourne la consommation propre du BCTRL.

        :return: Le courant en mA.
        :rtype: float
        """
        if not self.powered() or not self.state.booted:
            return 0.0

        params = self.config.battery

        return params.bctrl_sleep_ma if self.state.sleep_mode else params.bctrl_awake_ma

    def _load_payload(self) -> None:
        if self.payload is not None:
            self.payload.on_stop()

        self.payload = self.payload_factory(self.state.firmware, self) if self.payload_factory else None

    # Initialisation

    def init_bmon(self) -> None:
        """
        Programme les seuils matériels du BMON : dUVT/dOVT d'origine, ou les valeurs extrêmes avec DDT.

        :raises BmonUnreachableError: Si le BMON est en mode SHIP.
        """
        ddt = self.state.patch_set.ddt
        uv_trip, ov_trip = (ddt.uv_trip, ddt.ov_trip) if ddt else (self.thresholds.d_uvt, self.thresholds.d_ovt)

        try:
            self.bmon.access(I2cMessage.write(Register.UV_TRIP, uv_trip))
            self.bmon.access(I2cMessage.write(Register.OV_TRIP, ov_trip))
        except I2cTimeoutError as error:
            raise BmonUnreachableError(step="initBmon") from error

    def boot(self) -> bool:
        """
        Démarre le micrologiciel installé. L'indicateur de veille est remis à faux à chaque démarrage.

        :return: Vrai si le démarrage a abouti.
        :rtype: bool
        """
        state = self.state
        state.sleep_mode = False
        state.can_charge = True
        state.can_fw_update = not state.patch_set.dfu
        state.booted = False
        self.receiver.session.reset()

        try:
            self.init_bmon()
        except BmonUnreachableError as error:
            LOGGER.warning(str(error))
            self.event_log.append(NODE_NAME, EventKind.BOOT_ABORTED, reason=error.step)
            return False

        state.booted = True
        self.last_rx_ms = self.kernel.now
        self._next_status_ms = self.kernel.now
        self._protect_latched = False
        self.event_log.append(
            NODE_NAME,
            EventKind.BOOT,
            version=state.fwver,
            capabilities=sorted(str(capability) for capability in state.patch_set.capabilities),
        )
        LOGGER.debug(f"Démarrage du BCTRL {state.fwver}.")

        if self.payload is not None:
            self.payload.on_boot()

        return True

    def reboot(self) -> bool:
        self.event_log.append(NODE_NAME, EventKind.REBOOT, version=self.state.fwver)

        return self.boot()

    # Boucle principale

    def tick(self) -> None:
        """
        Itération de la boucle principale : lecture du BMON, branches d'équilibrage et de protection,
        contrôle de la charge, veille et trames d'état.
        """
        if not self.powered():
            if self.state.booted:
                self.state.booted = False
                self._set_charging(False)
            return

        if not self.state.booted and not self.boot():
            return

        now = self.kernel.now

        if self.payload is None or not self.payload.blocks_i2c:
            if self._poll_bmon():
                self._react(now)
                self.control_charge(now)

        if self.payload is not None:
            self.payload.on_tick(now)

        if self.awake and now >= self._next_status_ms:
            self._next_status_ms = now + self.config.kernel.status_interval_ms
            self.send_status()

    def _poll_bmon(self) -> bool:
        try:
            voltages = self.bmon.read_cell_voltages()
            self.faults = FaultFlags.from_sys_stat(self.bmon.access(I2cMessage.read(Register.SYS_STAT)))
        except I2cTimeoutError:
            LOGGER.warning("Le BMON ne répond plus à la lecture des tensions.")
            return False

        live = [voltage for voltage in voltages if voltage > 0]
        self.summary = CellSummary.from_voltages(voltages, batt_level=int(round(compute_batt_level(live))))
        self.reported_voltages = self._substitute_spoof(voltages)

        return True

    def _substitute_spoof(self, voltages: list[int]) -> list[int]:
        spoof = self.state.patch_set.scv_spoof

        if not self.state.patch_set.scv or spoof is None:
            return list(voltages)

        reported = list(voltages)
        reported[spoof.group_index - 1] = spoof.spoofed_mv

        return reported

    def _hardware_fault(self) -> bool:
        """
        Retourne vrai si le BMON signale un défaut qui ne provient pas uniquement des groupes ouverts.
        """
        if self.state.patch_set.dct:
            return False

        under = self.faults.under_trip and self.summary.live_groups > 0 and self.summary.min_mv < self.bmon.regs.uv_trip

        return under or self.faults.over_trip

    def _react(self, now: int) -> None:
        patch_set = self.state.patch_set
        self.branches = evaluate_branches(self.summary, self.thresholds, patch_set)
        self._write_cellbal(self.branches.balance)

        fault = self._hardware_fault()
        protect = self.branches.protect or fault

        if not patch_set.fbd:
            if self.branches.sleep or fault:
                self.enter_sleep("protection" if protect else "balance")
            elif now - self.last_rx_ms >= self.config.timing.idle_sleep_ms and not self.charger_present(now):
                self.enter_sleep("idle")
        elif self.state.sleep_mode:
            self.state.sleep_mode = False

        if protect and not self._protect_latched:
            self._protect_latched = True
            LOGGER.info(f"Protection du BCTRL : min {self.summary.min_mv} mV, max {self.summary.max_mv} mV.")
            for receiver in (NodeId.BTS, NodeId.DRV):
                self.send_frame(receiver, PacketType.WRITE, Command.POWER_OFF)
        elif not protect:
            self._protect_latched = False

    def _write_cellbal(self, balance: bool) -> None:
        mask = 0

        if balance and self.summary.live_groups:
            voltages = self.bmon.pack.voltages
            live = self.bmon.pack.live
            highest = max((index for index in range(len(voltages)) if live[index]), key=lambda index: voltages[index])
            mask = 1 << highest

        if mask == self.bmon.regs.cellbal_mask:
            return

        try:
            for position, register in enumerate(CELLBAL_REGISTERS[:2]):
                value = (mask >> (position * CELLBAL_BITS)) & 0x1F
                self.bmon.access(I2cMessage.write(register, value))
        except I2cTimeoutError:
            LOGGER.warning("Écriture des registres d'équilibrage impossible.")

    def enter_sleep(self, reason: str) -> None:
        if self.state.sleep_mode or self.state.patch_set.fbd:
            return

        self.state.sleep_mode = True
        self.sleep_count += 1
        self.event_log.append(NODE_NAME, EventKind.SLEEP, reason=reason)

    def wake(self) -> None:
        if not self.state.sleep_mode:
            return

        self.state.sleep_mode = False
        self.event_log.append(NODE_NAME, EventKind.WAKE)

    # Charge

    def charger_present(self, now: int) -> bool:
        return (
            self.charger_seen_ms is not None
            and now - self.charger_seen_ms <= 2 * self.config.kernel.status_interval_ms
        )

    def _set_charging(self, charging: bool, **detail) -> None:
        if charging == self.charging:
            return

        self.charging = charging
        self.event_log.append(NODE_NAME, EventKind.CHARGING, active=charging, **detail)

    def control_charge(self, now: int) -> bool:
        """
        Décide si la charge se poursuit : chargeur présent, canCharge lu vrai (DBC le force à faux), aucun
        défaut de surtension (ignoré sous DCT) et aucun groupe vivant sous cUVT, sauf avec une image de
        récupération.

        :param now: L'instant courant.
        :type now: int
        :return: Vrai si la charge est active.
        :rtype: bool
        """
        state = self.state
        present = self.charger_present(now)
        can_charge = False if state.patch_set.dbc else state.can_charge

        if present and not can_charge:
            if not self._charge_refused:
                self._charge_refused = True
                self.event_log.append(NODE_NAME, EventKind.CHARGING, active=False, reason="charge-disabled")
                LOGGER.warning("Chargeur branché mais la charge est refusée par le BCTRL.")
        elif not present:
            self._charge_refused = False

        over = self.faults.over_trip and not state.patch_set.dct
        below = (
            self.summary.live_groups > 0
            and self.summary.min_mv < self.thresholds.c_uvt
            and not state.allow_charge_below_cuvt
        )
        charging = present and can_charge and not over and not below and self.bmon.regs.charge_enabled
        self._set_charging(charging)

        return charging

    # Émission

    def send_frame(self, receiver: int, ptype: PacketType, command: Command, payload: bytes = b"") -> bool:
        frame = UartFrame(sender=NodeId.BCTRL, receiver=receiver, ptype=ptype, command=command, payload=payload)

        return self.bus.send(NodeId.BCTRL, frame)

    def voltages_payload(self) -> bytes:
        return b"".join(min(max(voltage, 0), 0xFFFF).to_bytes(2, "big") for voltage in self.reported_voltages)

    def send_status(self) -> None:
        """Émet les trames d'état vers le BTS : tensions rapportées et niveau de batterie."""
        if self.reported_voltages:
            self.send_frame(NodeId.BTS, PacketType.NOTIFY, Command.CELL_VOLTAGES, self.voltages_payload())

        self.send_frame(NodeId.BTS, PacketType.NOTIFY, Command.BATT_LEVEL, bytes([self.summary.batt_level]))

    # Réception

    def on_frame(self, frame: UartFrame) -> None:
        """
        Traite une trame adressée au BCTRL. Toute trame reçue réveille le BCTRL.

        :param frame: La trame authentifiée.
        :type frame: UartFrame
        """
        if self.payload is not None and self.payload.intercept(frame):
            return

        if not self.state.booted:
            return

        self.last_rx_ms = self.kernel.now
        self.wake()

        if frame.command in UPDATE_COMMANDS:
            self.handle_update_frame(frame)
            return

        match frame.command:
            case Command.FW_UNLOCK:
                self.handle_unlock_frame(frame)
            case Command.CHARGER_STATUS:
                self.charger_seen_ms = self.kernel.now
            case Command.BATT_LEVEL if frame.ptype == PacketType.READ:
                self.send_frame(frame.sender, PacketType.NOTIFY, Command.BATT_LEVEL, bytes([self.summary.batt_level]))
            case Command.CELL_VOLTAGES if frame.ptype == PacketType.READ:
                self.send_frame(frame.sender, PacketType.NOTIFY, Command.CELL_VOLTAGES, self.voltages_payload())
            case _:
                LOGGER.debug("Commande 0x{:02X} ignorée par le BCTRL.", frame.command)

    def handle_unlock_frame(self, frame: UartFrame) -> bool:
        """
        Traite une trame de déverrouillage 0xEE : le code doit correspondre exactement.

        :param frame: La trame.
        :type frame: UartFrame
        :return: Vrai si les mises à jour sont autorisées après la trame.
        :rtype: bool
        """
        if frame.payload != self.state.unlock_code:
            LOGGER.warning("Code de déverrouillage invalide.")
            return self.state.can_fw_update

        if not self.state.can_fw_update:
            self.state.can_fw_update = True
            self.event_log.append(NODE_NAME, EventKind.UNLOCK)
            LOGGER.info("Mises à jour du BCTRL déverrouillées.")

        return True

    def handle_update_frame(self, frame: UartFrame) -> Optional[InstallDecision]:
        """
        Traite une trame de mise à jour; la finalisation déclenche la vérification et l'installation.

        :param frame: La trame de mise à jour.
        :type frame: UartFrame
        :return: La décision d'installation à la finalisation, sinon None.
        :rtype: Optional[InstallDecision]
        """
        if not self.state.can_fw_update:
            self.event_log.append(NODE_NAME, EventKind.UPDATE_REJECTED, reason="Locked", cmd=f"0x{frame.command:02X}")
            return None

        image = self.receiver.handle(frame)

        return self.install(image) if image is not None else None

    def install(self, image: FirmwareImage) -> InstallDecision:
        """
        Vérifie une image reçue selon la politique puis l'installe et redémarre.

        :param image: L'image reçue.
        :type image: FirmwareImage
        :return: La décision.
        :rtype: InstallDecision
        """
        rule = self.policy.effective(self.profile, FirmwareTarget.BCTRL, self.state.fwver)
        decision = verify_and_install(
            image,
            rule,
            self.keys,
            min_live_cell_mv=self.bmon.pack.min_live_voltage(),
            c_uvt_mv=self.thresholds.c_uvt,
            expected_target=FirmwareTarget.BCTRL,
        )
        firmware = None

        if decision.accepted:
            try:
                firmware = decode_firmware_body(image.version, decision.body)
            except FirmwareBodyError as error:
                LOGGER.warning(str(error))
                decision = InstallDecision.reject(RejectReason.CORRUPT_BODY)

        if firmware is None:
            self.receiver.complete(accepted=False)
            self.event_log.append(
                NODE_NAME,
                EventKind.INSTALL_REJECTED,
                version=image.version,
                digest=image.digest,
                reason=str(decision.reason),
            )
            LOGGER.warning(f"Image BCTRL {image.version} refusée : {decision.reason}.")
            return decision

        self.receiver.complete(accepted=True)
        self.event_log.append(
            NODE_NAME,
            EventKind.INSTALL_ACCEPTED,
            version=image.version,
            digest=image.digest,
            recovery=image.allow_charge_below_cuvt,
        )
        LOGGER.info(f"Image BCTRL {image.version} installée.")
        self.state.firmware = firmware
        self.state.allow_charge_below_cuvt = image.allow_charge_below_cuvt
        self._load_payload()
        self.reboot()

        return decision

    # Primitives malveillantes

    def require(self, capability: Capability, operation: str) -> None:
        """
        :raises CapabilityUnavailableError: Si la capacité est absente du micrologiciel installé.
        """
        if not self.state.patch_set.has(capability):
            raise CapabilityUnavailableError(capability=str(capability), operation=operation)

    def spoof_frame(self, sender: int, receiver: int, ptype: int, command: int, payload: bytes = b"") -> bool:
        """
        Injecte une trame avec un émetteur arbitraire (MUB).

        :param sender: L'émetteur annoncé.
        :type sender: int
        :param receiver: Le destinataire.
        :type receiver: int
        :param ptype: Le type de paquet.
        :type ptype: int
        :param command: La commande.
        :type command: int
        :param payload: Les données.
        :type payload: bytes
        :return: Vrai si la trame a été placée sur le bus.
        :rtype: bool
        :raises CapabilityUnavailableError: Si MUB est absent.
        """
        self.require(Capability.MUB, "spoofFrame")
        frame = UartFrame(sender=sender, receiver=receiver, ptype=ptype, command=command, payload=payload)

        return self.bus.send(NodeId.BCTRL, frame, legit=False)

    def spoof_read(
        self,
        receiver: int,
        command: int,
        on_response: ResponseCallback,
        sender: int = NodeId.BTS,
    ) -> None:
        """
        Lecture usurpée : envoie une lecture au nom d'un autre nœud et capte la réponse diffusée sur le
        bus. Le rappel reçoit None si aucune réponse lisible n'arrive avant le délai.

        :param receiver: Le nœud interrogé.
        :type receiver: int
        :param command: Le champ lu.
        :type command: int
        :param on_response: Le rappel recevant les données.
        :type on_response: ResponseCallback
        :param sender: L'émetteur usurpé.
        :type sender: int
        :raises CapabilityUnavailableError: Si MUB est absent.
        """
        self.require(Capability.MUB, "spoofRead")
        timeout: Optional[EventHandle] = None
        done = False

        def finish(payload: Optional[bytes]) -> None:
            nonlocal done
            done = True
            self.bus.unlisten(NodeId.BCTRL, listener)
            SimKernel.cancel(timeout)
            on_response(payload)

        def listener(frame: UartFrame) -> None:
            if (
                not done
                and not frame.wrapped
                and frame.sender == receiver
                and frame.receiver == sender
                and frame.command == command
                and frame.ptype == PacketType.NOTIFY
            ):
                finish(frame.payload)

        def expire() -> None:
            if not done:
                finish(None)

        self.bus.listen(NodeId.BCTRL, listener)
        timeout = self.kernel.schedule_in(self.config.timing.spoof_response_timeout_ms, expire, label="spoof-timeout")
        self.spoof_frame(sender, receiver, PacketType.READ, command)

    def spoof_i2c(self, msg: I2cMessage) -> Optional[int]:
        """
        Envoie un message I2C arbitraire au BMON (MIB).

        :param msg: Le message.
        :type msg: I2cMessage
        :return: La valeur lue ou stockée, None si le BMON ne répond pas.
        :rtype: Optional[int]
        :raises CapabilityUnavailableError: Si MIB est absent.
        """
        self.require(Capability.MIB, "spoofI2c")

        try:
            return self.bmon.access(msg)
        except I2cTimeoutError:
            return None

    def set_ble_name(self, name: bytes) -> bool:
        """
        Change le nom BLE annoncé en usurpant le DRV auprès du BTS (CBA).

        :param name: Le nouveau nom.
        :type name: bytes
        :return: Vrai si la trame a été placée sur le bus.
        :rtype: bool
        :raises CapabilityUnavailableError: Si CBA est absent.
        """
        self.require(Capability.CBA, "setBleName")
        frame = UartFrame(
            sender=NodeId.DRV, receiver=NodeId.BTS, ptype=PacketType.WRITE, command=Command.BLE_ADVERT, payload=name
        )

        return self.bus.send(NodeId.BCTRL, frame, legit=False)
