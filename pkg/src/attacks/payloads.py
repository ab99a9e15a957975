"""
Module des programmes malveillants embarqués dans les images BCTRL.

Ce module contient les programmes UBR, UTI, DES1 à DES7 et PLR exécutés par le contrôleur de batterie,
ainsi que la fabrique qui associe un programme au micrologiciel installé.
"""

from typing import Callable, ClassVar, Optional

from loguru import logger

from battery import Register, I2cMessage, VC_REGISTERS, compute_batt_level
from battery.bmon import SYS_CTRL1_SHIP, SYS_CTRL2_CHG_ON, SYS_CTRL2_DSG_ON
from bctrl import BatteryController, BctrlFirmware, Capability, MaliciousPayload, PayloadKind
from bus import Command, NodeId, PacketType, UartFrame, node_name
from config import TimelineConfig
from simkern import EventHandle, EventKind, PeriodicHandle, SimKernel

from .attack_models import HASH_SIZE, UbrConfig
from .hash_fragments import split_hash
from .track import build_track, fingerprint_of

LOGGER = logger.bind(name="BES-Simulation.Attacks.Payloads")

NODE_NAME: str = "BCTRL"


class AttackPayload(MaliciousPayload):
    """
    Base des programmes de l'attaquant : démarrage unique, trames usurpées rattachées à leur étape et
    minuteries annulées au remplacement du micrologiciel.
    """

    steps: ClassVar[dict[str, frozenset[Capability]]] = {"block-updates": frozenset({Capability.DFU})}

    def __init__(self, controller: BatteryController) -> None:
        super().__init__(controller)
        self.started = False
        self.spoofed: dict[tuple[str, str], str] = {}
        """L'étape de chaque trame usurpée, par (destinataire, commande)."""
        self._handles: list[EventHandle | PeriodicHandle] = []

    @property
    def kernel(self) -> SimKernel:
        return self.controller.kernel

    @property
    def timeline(self) -> TimelineConfig:
        return self.controller.config.timeline

    def on_boot(self) -> None:
        if self.started:
            return

        self.started = True
        self.require("block-updates")
        self.start()

    def start(self) -> None:
        """Lancement du programme au premier démarrage du micrologiciel malveillant."""

    def on_stop(self) -> None:
        for handle in self._handles:
            SimKernel.cancel(handle)

        self._handles.clear()

    def fail(self, step: str, reason: str) -> None:
        """
        Journalise l'échec d'une étape qui disposait de ses capacités.

        :param step: L'étape.
        :type step: str
        :param reason: La cause.
        :type reason: str
        """
        if step in self.failed_steps:
            return

        self.failed_steps.append(step)
        self.log_phase("step-failed", step=step, reason=reason)
        LOGGER.warning(f"Étape '{step}' en échec : {reason}.")

    def after(self, delay_ms: int, callback: Callable[[], None], label: str) -> None:
        self._handles.append(self.kernel.schedule_in(delay_ms, callback, label=label))

    def every(self, period_ms: int, callback: Callable[[], None], label: str) -> None:
        self._handles.append(self.kernel.every(period_ms, callback, start=self.kernel.now + period_ms, label=label))

    def spoof(
        self,
        step: str,
        receiver: int,
        command: Command,
        payload: bytes = b"",
        sender: int = NodeId.BTS,
        ptype: PacketType = PacketType.WRITE,
    ) -> bool:
        """
        Injecte une trame usurpée au titre d'une étape.

        :param step: L'étape.
        :type step: str
        :param receiver: Le destinataire.
        :type receiver: int
        :param command: La commande.
        :type command: Command
        :param payload: Les données.
        :type payload: bytes
        :param sender: L'émetteur annoncé.
        :type sender: int
        :param ptype: Le type de paquet.
        :type ptype: PacketType
        :return: Vrai si la trame a été placée sur le bus.
        :rtype: bool
        """
        self.spoofed.setdefault((node_name(receiver), f"0x{int(command):02X}"), step)

        return self.controller.spoof_frame(sender, receiver, ptype, command, payload)


class UbrPayload(AttackPayload):
    """
    Rançongiciel par sous-tension : la batterie est déchargée jusqu'à l'endommagement des cellules, puis
    la rançon est annoncée en BLE.
    """

    kind = PayloadKind.UBR
    steps = {
        **AttackPayload.steps,
        "disable-undervoltage-checks": frozenset({Capability.DDT, Capability.DCT}),
        "disable-balancing": frozenset({Capability.DLB}),
        "disable-charging": frozenset({Capability.DBC}),
        "software-lock": frozenset({Capability.MUB}),
        "fast-discharge": frozenset({Capability.FBD, Capability.MUB}),
        "keep-outputs-on": frozenset({Capability.MIB}),
        "spoof-voltage": frozenset({Capability.SCV}),
        "reveal": frozenset({Capability.CBA}),
    }

    def __init__(self, controller: BatteryController) -> None:
        super().__init__(controller)
        url = self.firmware.ransom_url or controller.config.ubr.ransom_url.encode()
        self.ubr_config = UbrConfig(ransom_url=url)
        self.revealed_ms: Optional[int] = None
        self._crossed: set[tuple[int, str]] = set()

    def start(self) -> None:
        for step in ("disable-undervoltage-checks", "disable-balancing", "disable-charging", "spoof-voltage"):
            self.require(step)

        if self.require("software-lock"):
            self.spoof("software-lock", NodeId.DRV, Command.LOCK)

        if self.require("fast-discharge"):
            self.spoof("fast-discharge", NodeId.DRV, Command.LIGHTS_ON, b"\x01")

        if self.require("keep-outputs-on"):
            self.controller.spoof_i2c(I2cMessage.write(Register.SYS_CTRL2, SYS_CTRL2_CHG_ON | SYS_CTRL2_DSG_ON))

        self.log_phase("ubr-armed")
        LOGGER.info("Rançongiciel armé : décharge rapide en cours.")

    def on_tick(self, now: int) -> None:
        self._log_crossings()

        if self.revealed_ms is None and self.ubr_config.notify_user(self.controller.summary, self.controller.thresholds):
            if self.require("reveal"):
                self.controller.set_ble_name(self.ubr_config.ransom_url)
                self.revealed_ms = now
                self.log_phase("ransom-revealed", url=self.ubr_config.ransom_url.decode(errors="replace"))
                LOGGER.info(f"Rançon annoncée en BLE à {now} ms.")

    def _log_crossings(self) -> None:
        pack = self.controller.bmon.pack
        thresholds = self.controller.thresholds
        voltages = pack.voltages
        live = pack.live

        for index, voltage in enumerate(voltages):
            if not live[index]:
                continue

            for name, level in (("dUVT", thresholds.d_uvt), ("cUVT", thresholds.c_uvt)):
                if voltage < level and (index, name) not in self._crossed:
                    self._crossed.add((index, name))
                    self.controller.event_log.append(
                        NODE_NAME, EventKind.THRESHOLD_CROSSED, group=index + 1, threshold=name, mv=int(round(voltage))
                    )


class UtiPayload(AttackPayload):
    """
    Pistage : l'empreinte du DRV, le kilométrage et le niveau de batterie sont publiés comme nom BLE.
    """

    kind = PayloadKind.UTI
    steps = {
        **AttackPayload.steps,
        "read-drv-id": frozenset({Capability.MUB}),
        "read-mileage": frozenset({Capability.MUB}),
        "read-battery": frozenset({Capability.MIB}),
        "advertise-track": frozenset({Capability.CBA}),
    }

    def __init__(self, controller: BatteryController) -> None:
        super().__init__(controller)
        self.drv_id: Optional[bytes] = None
        self.published = 0

    def start(self) -> None:
        self.publish()
        self.every(self.timeline.uti_retrack_ms, self.publish, label="uti-retrack")

    def publish(self) -> None:
        if self.require("read-drv-id"):
            self.controller.spoof_read(NodeId.DRV, Command.DRV_ID, self._on_drv_id)

    def _on_drv_id(self, payload: Optional[bytes]) -> None:
        if payload is None:
            self.fail("read-drv-id", "no-response")
            return

        self.drv_id = payload

        if self.require("read-mileage"):
            self.controller.spoof_read(NodeId.DRV, Command.MILEAGE, self._on_mileage)

    def _on_mileage(self, payload: Optional[bytes]) -> None:
        if payload is None or len(payload) < 2:
            self.fail("read-mileage", "no-response")
            return

        level = self.read_battery_level()

        if level is None or self.drv_id is None:
            return

        track = build_track(self.drv_id, int.from_bytes(payload[:2], "big"), level)

        if self.require("advertise-track"):
            self.controller.set_ble_name(track.to_bytes())
            self.published += 1
            self.log_phase(
                "track-published",
                fingerprint=fingerprint_of(self.drv_id).hex(),
                mileage=track.mileage,
                battLevel=track.batt_level,
            )

    def read_battery_level(self) -> Optional[int]:
        """
        Lit les registres VC du BMON et calcule le niveau de batterie des groupes vivants.

        :return: Le niveau en pourcentage, None si la lecture est impossible.
        :rtype: Optional[int]
        """
        if not self.require("read-battery"):
            return None

        voltages = [self.controller.spoof_i2c(I2cMessage.read(register)) for register in VC_REGISTERS]

        if any(voltage is None for voltage in voltages):
            self.fail("read-battery", "bmon-unreachable")
            return None

        return int(round(compute_batt_level([voltage for voltage in voltages if voltage])))


class PlrPayload(AttackPayload):
    """
    Fuite du mot de passe : l'empreinte SHA256 lue sur le DRV est exfiltrée en trois noms BLE.
    """

    kind = PayloadKind.PLR
    steps = {
        **AttackPayload.steps,
        "read-hash": frozenset({Capability.MUB}),
        "rotate-names": frozenset({Capability.CBA}),
    }

    def start(self) -> None:
        if self.require("read-hash"):
            self.controller.spoof_read(NodeId.DRV, Command.PASSWORD_HASH, self._on_hash)

    def _on_hash(self, payload: Optional[bytes]) -> None:
        if payload is None or len(payload) != HASH_SIZE:
            self.fail("read-hash", "no-response")
            return

        if not self.require("rotate-names"):
            return

        fragments = split_hash(payload).fragments
        self.log_phase("hash-exfiltration", fragments=len(fragments))

        for index, fragment in enumerate(fragments):
            self.after(
                index * self.timeline.plr_rotation_ms,
                lambda fragment=fragment: self.controller.set_ble_name(fragment),
                label="plr-rotate",
            )


class DesPayload(AttackPayload):
    """
    Base des dénis de service : prise de contrôle des deux bus, puis action propre à la variante.
    """

    steps = {**AttackPayload.steps, "takeover": frozenset({Capability.MUB, Capability.MIB})}
    variant_steps: ClassVar[tuple[str, ...]] = ()
    """Les étapes propres à la variante, vérifiées au lancement."""

    def __init__(self, controller: BatteryController) -> None:
        super().__init__(controller)
        self.engaged = False

    def start(self) -> None:
        ready = [self.require(step) for step in ("block-updates", "takeover", *self.variant_steps)]

        if all(ready):
            self.engaged = True
            self.log_phase("denial-engaged", variant=self.kind.name)
            self.engage()

    def engage(self) -> None:
        """Action de la variante."""


class Des1Payload(DesPayload):
    """Toutes les trames UART et I2C destinées au BCTRL sont ignorées."""

    kind = PayloadKind.DES1

    def intercept(self, frame: UartFrame) -> bool:
        return self.engaged

    @property
    def blocks_i2c(self) -> bool:
        return self.engaged


class Des2Payload(DesPayload):
    """Le BMON est placé en mode SHIP : toutes les sorties sont coupées."""

    kind = PayloadKind.DES2
    steps = {**DesPayload.steps, "ship-mode": frozenset({Capability.MIB})}
    variant_steps = ("ship-mode",)

    def __init__(self, controller: BatteryController) -> None:
        super().__init__(controller)
        self.shipped = False

    def on_tick(self, now: int) -> None:
        if self.engaged and not self.shipped:
            self.shipped = True
            self.controller.spoof_i2c(I2cMessage.write(Register.SYS_CTRL1, SYS_CTRL1_SHIP))


class Des3Payload(DesPayload):
    """Le bus UART est inondé de trames factices au-delà de sa capacité."""

    kind = PayloadKind.DES3
    steps = {**DesPayload.steps, "flood": frozenset({Capability.MUB})}
    variant_steps = ("flood",)

    def engage(self) -> None:
        bus_config = self.controller.config.bus
        self.controller.bus.start_flood(NodeId.EXTERNAL, bus_config.capacity_fps * bus_config.flood_multiplier)

    def on_stop(self) -> None:
        super().on_stop()
        self.controller.bus.stop_flood()


class Des4Payload(DesPayload):
    """Le moteur est verrouillé à chaque itération et le DRV réinitialisé périodiquement."""

    kind = PayloadKind.DES4
    steps = {**DesPayload.steps, "lock-loop": frozenset({Capability.MUB})}
    variant_steps = ("lock-loop",)

    def engage(self) -> None:
        self.every(
            self.timeline.des4_reset_interval_ms,
            lambda: self.spoof("lock-loop", NodeId.DRV, Command.RESET),
            label="des4-reset",
        )

    def on_tick(self, now: int) -> None:
        if self.engaged:
            self.spoof("lock-loop", NodeId.DRV, Command.LOCK)


class Des5Payload(DesPayload):
    """La charge est refusée même avec un chargeur branché."""

    kind = PayloadKind.DES5
    steps = {**DesPayload.steps, "disable-charging": frozenset({Capability.DBC})}
    variant_steps = ("disable-charging",)


class Des6Payload(DesPayload):
    """Des erreurs 23 puis 24 sont forgées auprès du DRV."""

    kind = PayloadKind.DES6
    steps = {**DesPayload.steps, "forge-errors": frozenset({Capability.MUB})}
    variant_steps = ("forge-errors",)

    def engage(self) -> None:
        self.spoof("forge-errors", NodeId.DRV, Command.RAISE_ERROR, bytes([23]))
        self.after(
            self.timeline.des6_e24_delay_ms,
            lambda: self.spoof("forge-errors", NodeId.DRV, Command.RAISE_ERROR, bytes([24])),
            label="des6-e24",
        )


class Des7Payload(DesPayload):
    """Déni de veille : le BCTRL ne dort plus, la trottinette reste allumée, feux compris."""

    kind = PayloadKind.DES7
    steps = {
        **DesPayload.steps,
        "denial-of-sleep": frozenset({Capability.FBD}),
        "keep-awake": frozenset({Capability.MUB}),
    }
    variant_steps = ("denial-of-sleep", "keep-awake")

    def engage(self) -> None:
        self.spoof("keep-awake", NodeId.DRV, Command.LOCK)
        self.spoof("keep-awake", NodeId.DRV, Command.LIGHTS_ON, b"\x01")


PAYLOAD_CLASSES: dict[PayloadKind, type[AttackPayload]] = {
    PayloadKind.UBR: UbrPayload,
    PayloadKind.UTI: UtiPayload,
    PayloadKind.DES1: Des1Payload,
    PayloadKind.DES2: Des2Payload,
    PayloadKind.DES3: Des3Payload,
    PayloadKind.DES4: Des4Payload,
    PayloadKind.DES5: Des5Payload,
    PayloadKind.DES6: Des6Payload,
    PayloadKind.DES7: Des7Payload,
    PayloadKind.PLR: PlrPayload,
}


def build_payload(firmware: BctrlFirmware, controller: BatteryController) -> Optional[MaliciousPayload]:
    """
    Construit le programme embarqué dans un micrologiciel BCTRL.

    :param firmware: Le micrologiciel installé.
    :type firmware: BctrlFirmware
    :param controller: Le contrôleur qui l'exécute.
    :type controller: BatteryController
    :return: Le programme, None pour un micrologiciel sans programme.
    :rtype: Optional[MaliciousPayload]
    """
    payload_class = PAYLOAD_CLASSES.get(firmware.payload)

    return payload_class(controller) if payload_class is not None else None
