"""
Module des scénarios d'attaque.

Ce module contient la chronologie de chaque attaque (accès autorisé, fabrication et livraison de l'image
malveillante, actions de la victime) et l'évaluation de son résultat à partir du journal d'événements et
des observations du renifleur.
"""

import time
from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Any, ClassVar, Optional

from loguru import logger

from bctrl import Capability
from config import Attack, ScenarioConfig, SimulationConfig, UserBehavior
from simkern import EventKind, EventRecord

from .attack_models import (
    FIRMWARE_ENCRYPTED,
    OBSERVABLE_NOT_REACHED,
    OutcomeLabel,
    ScenarioOutcome,
    install_rejected,
    step_failed,
)
from .capabilities import ATTACK_PAYLOADS, patch_set_for
from .exception_attacks import ReassemblyError, StockFirmwareEncryptedError
from .hash_fragments import reassemble_hash
from .patcher import patch_stock_image
from .payloads import AttackPayload
from .pin_cracker import crack_pin
from .track import decode_tracks, fingerprint_of
from .unlock_authority import UNLOCK_CODE_SIZE

if TYPE_CHECKING:
    from fwpipe import FirmwareImage
    from simulation import ScooterSystem

LOGGER = logger.bind(name="BES-Simulation.Attacks.Scenarios")

NODE_NAME: str = "ATTACKER"
WATCH_INTERVAL_MS: int = 1000
DES4_MAX_UNLOCKED_MS: int = 1000
UTI_BCTRL_UPDATE_DELAY_MS: int = 5000
"""Le délai entre la mise à jour du DRV et la tentative de mise à jour du BCTRL par la victime."""


def craft_attack_image(
    system: "ScooterSystem",
    attack: Attack,
    unlock_code: bytes,
    capabilities: Optional[frozenset[Capability]] = None,
) -> "FirmwareImage":
    """
    Fabrique l'image BCTRL malveillante d'une attaque à partir de l'image d'origine de la trottinette.

    :param system: La trottinette simulée (image d'origine, clés divulguées et configuration).
    :type system: ScooterSystem
    :param attack: L'attaque.
    :type attack: Attack
    :param unlock_code: Le code de déverrouillage inscrit dans le programme embarqué.
    :type unlock_code: bytes
    :param capabilities: Les capacités installées, sinon celles de l'attaque.
    :type capabilities: Optional[frozenset[Capability]]
    :return: L'image modifiée.
    :rtype: FirmwareImage
    :raises StockFirmwareEncryptedError: Si l'image d'origine est chiffrée (C1).
    """
    return patch_stock_image(
        system.stock_bctrl_image(),
        system.keys.attacker_view(),
        patch_set_for(attack, capabilities),
        ATTACK_PAYLOADS[attack],
        unlock_code,
        ransom_url=system.config.ubr.ransom_url.encode() if attack == Attack.UBR else b"",
    )


class AttackScenario(ABC):
    """
    Classe abstraite pour les scénarios.
    """

    attack: ClassVar[Attack] = Attack.NONE
    user_behavior: ClassVar[UserBehavior] = UserBehavior.PRESENT
    """Le comportement de la victime, sauf indication contraire du descripteur."""
    needs_baseline: ClassVar[bool] = False
    """Le résultat est comparé à une exécution de référence sans attaque."""

    def __init__(self, capabilities: Optional[frozenset[Capability]] = None) -> None:
        """
        :param capabilities: Les capacités installées, sinon celles de l'attaque.
        :type capabilities: Optional[frozenset[Capability]]
        """
        self.capabilities = capabilities
        self.delivery_failure: Optional[str] = None
        self.delivered_ms: Optional[int] = None
        self.image_digest: Optional[str] = None
        self.serial: Optional[bytes] = None

    # Chronologie

    def setup(self, system: "ScooterSystem") -> None:
        """
        Planifie l'accès autorisé de l'attaquant puis la chronologie propre au scénario.

        :param system: La trottinette simulée.
        :type system: ScooterSystem
        """
        system.kernel.schedule(
            lambda: self.deliver(system), at=system.config.timeline.attack_delivery_ms, label="attack-delivery"
        )
        self.prepare(system)

    def prepare(self, system: "ScooterSystem") -> None:
        """Chronologie propre au scénario."""

    def deliver(self, system: "ScooterSystem") -> None:
        """
        Accès autorisé : lecture du numéro de série, enregistrement du code de déverrouillage, modification
        de l'image d'origine et livraison au BTS.

        :param system: La trottinette simulée.
        :type system: ScooterSystem
        """
        event_log = system.event_log
        self.delivered_ms = system.kernel.now
        event_log.append(NODE_NAME, EventKind.ATTACK_PHASE, phase="authorized-access", attack=str(self.attack))
        self.serial = system.bts.state.drv_serial

        if self.serial is None:
            self.delivery_failure = step_failed("read-serial")
            event_log.append(NODE_NAME, EventKind.ATTACK_PHASE, phase="step-failed", step="read-serial")
            return

        unlock_code = system.streams.random_bytes("unlock-code", UNLOCK_CODE_SIZE)
        system.authority.register(self.serial, unlock_code)

        try:
            image = craft_attack_image(system, self.attack, unlock_code, self.capabilities)
        except StockFirmwareEncryptedError as error:
            LOGGER.info(str(error))
            self.delivery_failure = FIRMWARE_ENCRYPTED
            event_log.append(NODE_NAME, EventKind.ATTACK_PHASE, phase="patch-failed", reason=FIRMWARE_ENCRYPTED)
            return

        self.image_digest = image.digest
        event_log.append(
            NODE_NAME, EventKind.ATTACK_PHASE, phase="image-delivered", version=image.version, digest=image.digest
        )
        system.bts.deliver_image(image)

    # Évaluation

    def records_since_delivery(self, system: "ScooterSystem", kind: EventKind, **match: Any) -> list[EventRecord]:
        start = self.delivered_ms if self.delivered_ms is not None else 0

        return [record for record in system.event_log.select(kind, **match) if record.t >= start]

    def installed_ms(self, system: "ScooterSystem") -> Optional[int]:
        if self.image_digest is None:
            return None

        accepted = self.records_since_delivery(
            system, EventKind.INSTALL_ACCEPTED, node="BCTRL", digest=self.image_digest
        )

        return accepted[0].t if accepted else None

    def failure_reason(self, system: "ScooterSystem") -> Optional[str]:
        """
        Retourne la cause d'échec définitive du scénario : image non modifiable, installation refusée,
        étape impossible ou trame usurpée rejetée.

        :param system: La trottinette simulée.
        :type system: ScooterSystem
        :return: La cause, None si aucune cause n'est établie.
        :rtype: Optional[str]
        """
        if self.delivery_failure is not None:
            return self.delivery_failure

        if self.delivered_ms is None:
            return None

        installed = self.installed_ms(system)
        rejected = [
            record
            for record in self.records_since_delivery(
                system, EventKind.INSTALL_REJECTED, node="BCTRL", digest=self.image_digest
            )
            if installed is None or record.t <= installed
        ]

        if rejected:
            return install_rejected(rejected[0].detail["reason"])

        failed = self.records_since_delivery(system, EventKind.ATTACK_PHASE, phase="step-failed")

        if failed:
            return step_failed(failed[0].detail["step"])

        payload = system.bctrl.payload

        if isinstance(payload, AttackPayload) and payload.spoofed:
            for record in self.records_since_delivery(system, EventKind.FRAME_REJECTED):
                step = payload.spoofed.get((record.node, record.detail.get("cmd")))

                if step is not None:
                    return step_failed(step)

        return None

    def settled(self, system: "ScooterSystem") -> bool:
        """Indique que l'observable est atteint et que l'exécution peut s'arrêter plus tôt."""
        return False

    def is_final(self, system: "ScooterSystem") -> bool:
        return self.failure_reason(system) is not None or self.settled(system)

    @abstractmethod
    def observe(self, system: "ScooterSystem", baseline: Optional[dict[str, Any]]) -> Optional[OutcomeLabel]:
        """
        Vérifie l'observable du scénario.

        :param system: La trottinette simulée, à la fin de l'exécution.
        :type system: ScooterSystem
        :param baseline: Les métriques de l'exécution de référence, si le scénario en exige une.
        :type baseline: Optional[dict[str, Any]]
        :return: L'étiquette de succès, None si l'observable n'est pas atteint.
        :rtype: Optional[OutcomeLabel]
        """

    def scenario_metrics(self, system: "ScooterSystem") -> dict[str, Any]:
        return {}

    def metrics(self, system: "ScooterSystem") -> dict[str, Any]:
        """
        Retourne les métriques communes et celles du scénario.

        :param system: La trottinette simulée.
        :type system: ScooterSystem
        :return: Les métriques.
        :rtype: dict[str, Any]
        """
        pack = system.pack
        counters = system.bus.counters

        return {
            "endMs": system.kernel.now,
            "autonomyLossPct": round(float(pack.autonomy_loss_pct()), 3),
            "deadCells": int((~pack.live).sum()),
            "minLiveCellMv": int(round(pack.min_live_voltage())),
            "drainedMah": round(system.initial_charge_mah - float(pack.total_charge_mah), 3),
            "sleepCount": system.bctrl.sleep_count,
            "btsReboots": system.bts.reboots,
            "rideableMs": system.drv.rideable_ms,
            "errors": [record.detail["code"] for record in system.event_log.select(EventKind.ERROR_RAISED)],
            "framesSent": counters.frames_sent,
            "framesDropped": counters.frames_dropped,
            "legitFramesDropped": counters.legit_frames_dropped,
            "framesRejected": counters.frames_rejected,
            "installedMs": self.installed_ms(system),
            **self.scenario_metrics(system),
        }

    def evaluate(self, system: "ScooterSystem", baseline: Optional[dict[str, Any]] = None) -> ScenarioOutcome:
        """
        Établit le résultat du scénario.

        :param system: La trottinette simulée, à la fin de l'exécution.
        :type system: ScooterSystem
        :param baseline: Les métriques de l'exécution de référence.
        :type baseline: Optional[dict[str, Any]]
        :return: Le résultat.
        :rtype: ScenarioOutcome
        """
        reason = self.failure_reason(system)
        label: Optional[OutcomeLabel] = None

        if reason is None:
            label = self.observe(system, baseline)

            if label is None:
                reason = OBSERVABLE_NOT_REACHED

        scenario = system.scenario
        outcome = ScenarioOutcome(
            attack=scenario.attack,
            profile=scenario.profile,
            countermeasures=scenario.countermeasures,
            seed=scenario.seed,
            label=label or OutcomeLabel.ATTACK_FAILED,
            failure_reason=reason,
            metrics=self.metrics(system),
        )
        LOGGER.info(f"Résultat {scenario.label} : {outcome.label} {reason or ''}".rstrip())

        return outcome


class BaselineScenario(AttackScenario):
    """
    Exécution de référence sans attaque.
    """

    attack = Attack.NONE

    def setup(self, system: "ScooterSystem") -> None:
        return None

    def failure_reason(self, system: "ScooterSystem") -> Optional[str]:
        return None

    def observe(self, system: "ScooterSystem", baseline: Optional[dict[str, Any]]) -> Optional[OutcomeLabel]:
        return OutcomeLabel.BASELINE


class UbrScenario(AttackScenario):
    """
    Rançongiciel par sous-tension, avec la récupération après paiement lorsqu'un délai de paiement est
    configuré.
    """

    attack = Attack.UBR

    def __init__(self, capabilities: Optional[frozenset[Capability]] = None) -> None:
        super().__init__(capabilities)
        self.revealed_ms: Optional[int] = None
        self.recovery_sent = False
        self.stock_sent = False

    def prepare(self, system: "ScooterSystem") -> None:
        system.kernel.every(WATCH_INTERVAL_MS, lambda: self.watch(system), label="ubr-watch")

    def watch(self, system: "ScooterSystem") -> None:
        if self.revealed_ms is None:
            revealed = system.event_log.first(EventKind.ATTACK_PHASE, phase="ransom-revealed")

            if revealed is None:
                return

            self.revealed_ms = revealed.t
            timeline = system.config.timeline
            system.kernel.schedule_in(timeline.ubr_charge_attempt_ms, system.user.connect_charger, label="ubr-charger")
            payment_delay = system.config.ubr.payment_delay_ms

            if payment_delay is not None:
                system.kernel.schedule_in(payment_delay, lambda: self.pay_ransom(system), label="ubr-payment")
            return

        if self.recovery_sent and not self.stock_sent and system.bctrl.state.allow_charge_below_cuvt:
            if system.pack.min_live_voltage() > system.pack.thresholds.c_uvt:
                self.stock_sent = True
                system.event_log.append("USER", EventKind.ATTACK_PHASE, phase="stock-reinstall")
                system.user.install_image(system.stock_bctrl_image())

    def pay_ransom(self, system: "ScooterSystem") -> None:
        """
        Paiement de la victime, code de déverrouillage, puis image de récupération.

        :param system: La trottinette simulée.
        :type system: ScooterSystem
        """
        if self.serial is None:
            return

        system.user.pay()
        system.authority.simulate_payment(self.serial)
        system.user.send_unlock_code(system.authority.unlock_firmware(self.serial))
        system.kernel.schedule_in(WATCH_INTERVAL_MS, lambda: self.send_recovery(system), label="ubr-recovery")

    def send_recovery(self, system: "ScooterSystem") -> None:
        self.recovery_sent = True
        system.user.install_image(system.recovery_bctrl_image())

    def settled(self, system: "ScooterSystem") -> bool:
        if system.config.ubr.payment_delay_ms is not None:
            return False

        return self.revealed_ms is not None or bool(
            self.records_since_delivery(system, EventKind.POWER_OFF, reason="E24")
        )

    def observe(self, system: "ScooterSystem", baseline: Optional[dict[str, Any]]) -> Optional[OutcomeLabel]:
        if self.installed_ms(system) is None:
            return None

        if self.records_since_delivery(system, EventKind.ERROR_RAISED, code="E24"):
            return OutcomeLabel.SUCCESS_WITH_E24

        if system.event_log.first(EventKind.ATTACK_PHASE, phase="ransom-revealed") is not None:
            return OutcomeLabel.SUCCESS

        return None

    def scenario_metrics(self, system: "ScooterSystem") -> dict[str, Any]:
        revealed = system.event_log.first(EventKind.ATTACK_PHASE, phase="ransom-revealed")
        e24 = system.event_log.first(EventKind.ERROR_RAISED, code="E24")
        cuvt = system.event_log.first(EventKind.THRESHOLD_CROSSED, threshold="cUVT")
        installed = self.installed_ms(system)

        return {
            "timeToReveal": revealed.t - installed if revealed is not None and installed is not None else None,
            "e24Ms": e24.t if e24 is not None else None,
            "firstCuvtMs": cuvt.t if cuvt is not None else None,
            "paid": system.event_log.count(EventKind.PAYMENT) > 0,
            "recovered": self.stock_sent,
            "canFwUpdate": system.bctrl.state.can_fw_update,
        }


class UtiScenario(AttackScenario):
    """
    Pistage par les composants internes, à travers une réinitialisation d'usine et une mise à jour du DRV.
    """

    attack = Attack.UTI

    def prepare(self, system: "ScooterSystem") -> None:
        timeline = system.config.timeline
        system.kernel.schedule(system.user.factory_reset, at=timeline.uti_factory_reset_ms, label="uti-factory-reset")
        system.kernel.schedule(
            lambda: system.user.install_image(system.drv_update_image()),
            at=timeline.uti_drv_update_ms,
            label="uti-drv-update",
        )
        system.kernel.schedule(
            lambda: system.user.install_image(system.stock_bctrl_image()),
            at=timeline.uti_drv_update_ms + UTI_BCTRL_UPDATE_DELAY_MS,
            label="uti-bctrl-update",
        )

    def checkpoints(self, system: "ScooterSystem") -> list[int]:
        """Instants après lesquels un message Track doit encore être observé."""
        resets = system.event_log.select(EventKind.FACTORY_RESET, node="DRV")
        updates = system.event_log.select(EventKind.INSTALL_ACCEPTED, node="DRV")

        return [record.t for record in resets[:1] + updates[:1]]

    def tracks(self, system: "ScooterSystem"):
        return decode_tracks(system.sniffer.adverts, fingerprint=fingerprint_of(system.drv.state.drv_id))

    def observe(self, system: "ScooterSystem", baseline: Optional[dict[str, Any]]) -> Optional[OutcomeLabel]:
        tracks = self.tracks(system)

        if not tracks or any(track.mileage != system.drv.state.mileage_km for _, track in tracks):
            return None

        if all(any(t > checkpoint for t, _ in tracks) for checkpoint in self.checkpoints(system)):
            return OutcomeLabel.SUCCESS

        return None

    def scenario_metrics(self, system: "ScooterSystem") -> dict[str, Any]:
        tracks = self.tracks(system)
        checkpoints = self.checkpoints(system)
        first = tracks[0][1] if tracks else None

        return {
            "trackCount": len(tracks),
            "fingerprint": first.fingerprint.hex() if first else None,
            "mileage": first.mileage if first else None,
            "battLevel": first.batt_level if first else None,
            "tracksAfterCheckpoints": [sum(1 for t, _ in tracks if t > checkpoint) for checkpoint in checkpoints],
            "paired": system.bts.state.paired,
            "bctrlUpdateLocked": bool(system.event_log.select(EventKind.UPDATE_REJECTED, node="BCTRL")),
        }


class PlrScenario(AttackScenario):
    """
    Fuite de l'empreinte du mot de passe puis craquage hors ligne.
    """

    attack = Attack.PLR

    def __init__(self, capabilities: Optional[frozenset[Capability]] = None) -> None:
        super().__init__(capabilities)
        self.recovered: Optional[str] = None
        self.crack_ms: Optional[float] = None
        self.reassembly: Optional[str] = None
        self._evaluated = False

    def adverts(self, system: "ScooterSystem"):
        return system.sniffer.window(start=self.installed_ms(system) or 0)

    def crack(self, system: "ScooterSystem") -> None:
        if self._evaluated:
            return

        self._evaluated = True

        try:
            digest = reassemble_hash(self.adverts(system))
        except ReassemblyError as error:
            self.reassembly = str(error)
            return

        self.reassembly = "complete" if digest == system.drv.state.password_hash else "mismatch"
        started = time.perf_counter()
        self.recovered = crack_pin(digest, mode=system.config.plr.crack_mode)
        self.crack_ms = (time.perf_counter() - started) * 1000.0

    def settled(self, system: "ScooterSystem") -> bool:
        return self.installed_ms(system) is not None and len(
            self.records_since_delivery(system, EventKind.REBOOT, node="BTS", reason="name-change")
        ) >= 3 and len(self.adverts(system)) >= 3

    def observe(self, system: "ScooterSystem", baseline: Optional[dict[str, Any]]) -> Optional[OutcomeLabel]:
        self.crack(system)

        return OutcomeLabel.SUCCESS if self.recovered == system.config.drv_data.password else None

    def scenario_metrics(self, system: "ScooterSystem") -> dict[str, Any]:
        self.crack(system)

        return {
            "reassembly": self.reassembly,
            "recoveredPin": self.recovered,
            "crackTimeMs": round(self.crack_ms, 3) if self.crack_ms is not None else None,
            "exfiltrationReboots": len(
                self.records_since_delivery(system, EventKind.REBOOT, node="BTS", reason="name-change")
            ),
        }


class DesScenario(AttackScenario):
    """
    Base des dénis de service.
    """

    def power_offs(self, system: "ScooterSystem", reason: str) -> list[EventRecord]:
        return self.records_since_delivery(system, EventKind.POWER_OFF, reason=reason)

    def errors(self, system: "ScooterSystem", code: str, **match: Any) -> list[EventRecord]:
        return self.records_since_delivery(system, EventKind.ERROR_RAISED, node="DRV", code=code, **match)


class Des1Scenario(DesScenario):
    """Les trames destinées au BCTRL sont ignorées : E21 puis extinction."""

    attack = Attack.DES1

    def settled(self, system: "ScooterSystem") -> bool:
        return bool(self.power_offs(system, "E21"))

    def observe(self, system: "ScooterSystem", baseline: Optional[dict[str, Any]]) -> Optional[OutcomeLabel]:
        ok = self.installed_ms(system) is not None and self.errors(system, "E21") and self.power_offs(system, "E21")

        return OutcomeLabel.SUCCESS if ok else None


class Des2Scenario(DesScenario):
    """Mode SHIP : toutes les tentatives d'allumage échouent."""

    attack = Attack.DES2

    def prepare(self, system: "ScooterSystem") -> None:
        system.kernel.schedule(
            lambda: system.user.retry_power_on(system.config.timeline.des2_power_on_retry_ms),
            at=system.config.timeline.attack_delivery_ms,
            label="des2-retry",
        )

    def shipped_ms(self, system: "ScooterSystem") -> Optional[int]:
        shipped = self.records_since_delivery(system, EventKind.SHIP_MODE, active=True)

        return shipped[0].t if shipped else None

    def settled(self, system: "ScooterSystem") -> bool:
        return self.shipped_ms(system) is not None and bool(
            self.records_since_delivery(system, EventKind.POWER_ON_FAILED)
        )

    def observe(self, system: "ScooterSystem", baseline: Optional[dict[str, Any]]) -> Optional[OutcomeLabel]:
        shipped = self.shipped_ms(system)

        if shipped is None:
            return None

        failed = [record for record in system.event_log.select(EventKind.POWER_ON_FAILED) if record.t >= shipped]
        succeeded = [record for record in system.event_log.select(EventKind.POWER_ON) if record.t >= shipped]

        return OutcomeLabel.SUCCESS if failed and not succeeded and not system.power.nodes_powered() else None

    def scenario_metrics(self, system: "ScooterSystem") -> dict[str, Any]:
        return {
            "shipModeMs": self.shipped_ms(system),
            "powerOnFailures": system.event_log.count(EventKind.POWER_ON_FAILED),
        }


class Des3Scenario(DesScenario):
    """Inondation du bus : E21 puis extinction."""

    attack = Attack.DES3

    def settled(self, system: "ScooterSystem") -> bool:
        return bool(self.power_offs(system, "E21"))

    def observe(self, system: "ScooterSystem", baseline: Optional[dict[str, Any]]) -> Optional[OutcomeLabel]:
        return OutcomeLabel.SUCCESS if self.errors(system, "E21") else None

    def scenario_metrics(self, system: "ScooterSystem") -> dict[str, Any]:
        counters = system.bus.counters

        return {"floodFrames": counters.flood_frames, "floodDropped": counters.flood_dropped}


class Des4Scenario(DesScenario):
    """Verrouillages et réinitialisations en boucle : la trottinette n'est jamais utilisable."""

    attack = Attack.DES4

    def prepare(self, system: "ScooterSystem") -> None:
        system.kernel.schedule(
            lambda: system.user.retry_unlock(system.config.timeline.des4_unlock_retry_ms),
            at=system.config.timeline.attack_delivery_ms,
            label="des4-retry",
        )

    def max_unlocked_ms(self, system: "ScooterSystem") -> Optional[int]:
        """
        Retourne la plus longue période déverrouillée après le premier verrouillage usurpé.

        :param system: La trottinette simulée.
        :type system: ScooterSystem
        :return: La durée en ms, None si le moteur n'a jamais été verrouillé.
        :rtype: Optional[int]
        """
        events = self.records_since_delivery(system, EventKind.LOCK, node="DRV")
        first_lock = next((index for index, record in enumerate(events) if record.detail["locked"]), None)

        if first_lock is None:
            return None

        longest = 0
        unlocked_at: Optional[int] = None

        for record in events[first_lock:]:
            if not record.detail["locked"]:
                unlocked_at = record.t
            elif unlocked_at is not None:
                longest = max(longest, record.t - unlocked_at)
                unlocked_at = None

        if unlocked_at is not None:
            longest = max(longest, system.kernel.now - unlocked_at)

        return longest

    def observe(self, system: "ScooterSystem", baseline: Optional[dict[str, Any]]) -> Optional[OutcomeLabel]:
        longest = self.max_unlocked_ms(system)

        return OutcomeLabel.SUCCESS if longest is not None and longest < DES4_MAX_UNLOCKED_MS else None

    def scenario_metrics(self, system: "ScooterSystem") -> dict[str, Any]:
        return {
            "maxUnlockedMs": self.max_unlocked_ms(system),
            "unlockAttempts": system.user.unlock_attempts,
            "powerCycleLoop": system.event_log.count(EventKind.POWER_CYCLE_LOOP) > 0,
        }


class Des5Scenario(DesScenario):
    """La charge n'a jamais lieu malgré le chargeur branché."""

    attack = Attack.DES5

    def prepare(self, system: "ScooterSystem") -> None:
        timeline = system.config.timeline
        system.kernel.schedule(
            system.user.connect_charger,
            at=timeline.attack_delivery_ms + timeline.des5_charger_delay_ms,
            label="des5-charger",
        )

    def observe(self, system: "ScooterSystem", baseline: Optional[dict[str, Any]]) -> Optional[OutcomeLabel]:
        refused = self.records_since_delivery(system, EventKind.CHARGING, reason="charge-disabled")
        charged = self.records_since_delivery(system, EventKind.CHARGING, active=True)

        return OutcomeLabel.SUCCESS if refused and not charged else None


class Des6Scenario(DesScenario):
    """Erreurs forgées : bips de l'erreur 23, puis extinction par l'erreur 24."""

    attack = Attack.DES6

    def settled(self, system: "ScooterSystem") -> bool:
        return bool(self.power_offs(system, "E24"))

    def observe(self, system: "ScooterSystem", baseline: Optional[dict[str, Any]]) -> Optional[OutcomeLabel]:
        beeping = bool(self.errors(system, "E23", source="command")) and bool(
            self.records_since_delivery(system, EventKind.BEEP)
        )
        powered_off = bool(self.errors(system, "E24", source="command")) and bool(self.power_offs(system, "E24"))

        return OutcomeLabel.SUCCESS if beeping or powered_off else None

    def scenario_metrics(self, system: "ScooterSystem") -> dict[str, Any]:
        return {"beeps": system.event_log.count(EventKind.BEEP)}


class Des7Scenario(DesScenario):
    """Déni de veille, comparé à une exécution de référence stationnée sans attaque."""

    attack = Attack.DES7
    user_behavior = UserBehavior.PARKED
    needs_baseline = True

    def observe(self, system: "ScooterSystem", baseline: Optional[dict[str, Any]]) -> Optional[OutcomeLabel]:
        if baseline is None or self.installed_ms(system) is None:
            return None

        ratio = self.drain_ratio(system, baseline)

        return OutcomeLabel.SUCCESS if system.bctrl.sleep_count == 0 and ratio is not None and ratio > 1 else None

    def drain_ratio(self, system: "ScooterSystem", baseline: dict[str, Any]) -> Optional[float]:
        reference = baseline.get("drainedMah") or 0.0

        if reference <= 0:
            return None

        return (system.initial_charge_mah - float(system.pack.total_charge_mah)) / reference

    def evaluate(self, system: "ScooterSystem", baseline: Optional[dict[str, Any]] = None) -> ScenarioOutcome:
        outcome = super().evaluate(system, baseline)

        if baseline is not None:
            ratio = self.drain_ratio(system, baseline)
            outcome.metrics.update(
                {
                    "baselineSleepCount": baseline.get("sleepCount"),
                    "baselineDrainedMah": baseline.get("drainedMah"),
                    "drainRatio": round(ratio, 4) if ratio is not None else None,
                }
            )

        return outcome


FACTORY_ATTACK: dict[Attack, type[AttackScenario]] = {
    Attack.NONE: BaselineScenario,
    Attack.UBR: UbrScenario,
    Attack.UTI: UtiScenario,
    Attack.DES1: Des1Scenario,
    Attack.DES2: Des2Scenario,
    Attack.DES3: Des3Scenario,
    Attack.DES4: Des4Scenario,
    Attack.DES5: Des5Scenario,
    Attack.DES6: Des6Scenario,
    Attack.DES7: Des7Scenario,
    Attack.PLR: PlrScenario,
}
"""Le scénario de chaque attaque."""


def _run(scenario: ScenarioConfig, config: Optional[SimulationConfig]) -> ScenarioOutcome:
    from simulation import run_scenario

    return run_scenario(scenario, config).outcome


def run_ubr(scenario: ScenarioConfig, config: Optional[SimulationConfig] = None) -> ScenarioOutcome:
    """
    Exécute le rançongiciel UBR.

    :param scenario: Le descripteur (l'attaque est forcée à UBR).
    :type scenario: ScenarioConfig
    :param config: La configuration de la simulation.
    :type config: Optional[SimulationConfig]
    :return: Le résultat.
    :rtype: ScenarioOutcome
    """
    return _run(scenario.model_copy(update={"attack": Attack.UBR}), config)


def run_uti(scenario: ScenarioConfig, config: Optional[SimulationConfig] = None) -> ScenarioOutcome:
    return _run(scenario.model_copy(update={"attack": Attack.UTI}), config)


def run_des(variant: int, scenario: ScenarioConfig, config: Optional[SimulationConfig] = None) -> ScenarioOutcome:
    """
    Exécute une variante du déni de service.

    :param variant: Le numéro de la variante (1 à 7).
    :type variant: int
    :param scenario: Le descripteur.
    :type scenario: ScenarioConfig
    :param config: La configuration de la simulation.
    :type config: Optional[SimulationConfig]
    :return: Le résultat.
    :rtype: ScenarioOutcome
    :raises ValueError: Si la variante n'existe pas.
    """
    if not 1 <= variant <= 7:
        raise ValueError("Les variantes du déni de service sont numérotées de 1 à 7.")

    return _run(scenario.model_copy(update={"attack": Attack(f"des{variant}")}), config)


def run_plr(scenario: ScenarioConfig, config: Optional[SimulationConfig] = None) -> ScenarioOutcome:
    return _run(scenario.model_copy(update={"attack": Attack.PLR}), config)
