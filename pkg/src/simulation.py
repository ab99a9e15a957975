"""
Module principal de la simulation.

Ce module contient l'assemblage de la trottinette simulée (noyau, bus, batterie, nœuds, chargeur,
utilisateur et attaquant), la boucle physique, l'exécution d'un scénario, la matrice attaques x
contre-mesures et le flashage d'une image à travers le BTS.
"""

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Any, Optional

from loguru import logger

from attacks import FACTORY_ATTACK, AttackScenario, ScenarioOutcome, UnlockAuthority, build_payload
from battery import BatteryMonitor, BatteryPack, BmonRegisters, PackSpec, Thresholds
from bctrl import BatteryController, BctrlFirmware, Capability, encode_firmware_body, stock_code
from bus import SenderRateLimiter, UartBus, provision_channel
from config import (
    Attack,
    Countermeasure,
    DES_VARIANTS,
    Profile,
    ScenarioConfig,
    SimulationConfig,
    UserBehavior,
    get_simulation_config,
)
from fwpipe import FirmwareImage, FirmwareTarget, build_signing_policy, generate_key_material, parse_version, release_image
from periph import (
    BluetoothModule,
    BtsState,
    Charger,
    DrvState,
    MotorDriver,
    PowerSwitch,
    ScriptedUser,
    Sniffer,
    default_ble_name,
    make_drv_id,
)
from simkern import EventKind, EventLog, EventRecord, RandomStreams, SimKernel
import schema.model_ids as schema_ids


__version__ = "0.3.0"


LOGGER = logger.bind(name="BES-Simulation.WorkFlow")

CONFIG_FILE: Path = Path(__file__).parent / "CONFIG_bes-simulation.toml"

BCTRL_SERIAL_SIZE: int = 14
FINAL_CHECK_INTERVAL_MS: int = 1000
FLASH_TIMEOUT_MS: int = 60_000
MATRIX_ATTACKS: tuple[Attack, ...] = (Attack.UBR, Attack.UTI, *DES_VARIANTS, Attack.PLR)


def bump_version(version: str) -> str:
    """
    Incrémente la dernière composante d'une version pointée.

    :param version: La version (ex. '1.5.5').
    :type version: str
    :return: La version suivante (ex. '1.5.6').
    :rtype: str
    """
    parts = list(parse_version(version))
    parts[-1] += 1

    return ".".join(str(part) for part in parts)


class ScooterSystem:
    """
    Trottinette simulée : tous les nœuds raccordés au noyau, au journal et au bus du scénario.
    """

    def __init__(
        self,
        scenario: ScenarioConfig,
        config: SimulationConfig,
        attack_scenario: Optional[AttackScenario] = None,
    ) -> None:
        """
        :param scenario: Le descripteur du scénario.
        :type scenario: ScenarioConfig
        :param config: La configuration de la simulation.
        :type config: SimulationConfig
        :param attack_scenario: Le scénario d'attaque, celui de l'attaque du descripteur si absent.
        :type attack_scenario: Optional[AttackScenario]
        """
        self.scenario = scenario
        self.config = config
        self.profile_config = config.profile(scenario.profile)
        self.attack_scenario = attack_scenario or FACTORY_ATTACK[scenario.attack]()

        self.kernel = SimKernel()
        self.event_log = EventLog(self.kernel.clock)
        self.streams = RandomStreams(scenario.seed)
        self.keys = generate_key_material(self.streams)
        self.policy = build_signing_policy(scenario.countermeasures)
        self.authority = UnlockAuthority()

        bus_config = config.bus
        self.bus = UartBus(
            kernel=self.kernel,
            event_log=self.event_log,
            config=bus_config,
            channel=provision_channel(self.streams) if scenario.has(Countermeasure.C3) else None,
            rate_limiter=(
                SenderRateLimiter(capacity=bus_config.rate_limit_capacity, drain_rate=bus_config.rate_limit_drain_fps)
                if scenario.has(Countermeasure.C4)
                else None
            ),
        )

        self.pack = BatteryPack.from_profile(
            PackSpec.from_profile(self.profile_config), config.battery, Thresholds(), scenario.initial_soc
        )
        self.initial_charge_mah: float = self.pack.total_charge_mah
        self.bmon = BatteryMonitor(regs=BmonRegisters(pack=self.pack), event_log=self.event_log)
        self.power = PowerSwitch(bmon=self.bmon, event_log=self.event_log)
        self.sniffer = Sniffer()

        drv_id = make_drv_id(self.profile_config.model_code, self.streams)
        self.bts = BluetoothModule(
            self.kernel,
            self.event_log,
            self.bus,
            self.power,
            config,
            BtsState(
                ble_name=default_ble_name(drv_id),
                default_name=default_ble_name(drv_id),
                version=self.profile_config.bts_version,
            ),
            self.sniffer,
        )
        self.drv = MotorDriver(
            self.kernel,
            self.event_log,
            self.bus,
            self.power,
            self.pack,
            scenario.profile,
            config,
            DrvState.from_config(drv_id, self.profile_config.drv_version, config.drv_data),
            self.keys,
            self.policy,
        )
        version = self.profile_config.bctrl_version
        self.bctrl = BatteryController(
            self.kernel,
            self.event_log,
            self.bus,
            self.bmon,
            self.keys,
            self.policy,
            scenario.profile,
            config,
            firmware=BctrlFirmware(version=version, code=stock_code(version)),
            serial=self.streams.random_bytes("bctrl-serial", BCTRL_SERIAL_SIZE),
            payload_factory=build_payload,
        )
        self.charger = Charger(self.kernel, self.event_log, self.bus, self.bmon, config)
        self.user = ScriptedUser(
            self.kernel,
            self.event_log,
            self.power,
            self.bts,
            self.drv,
            self.charger,
            config,
            behavior=scenario.user_behavior or self.attack_scenario.user_behavior,
        )

        self.traces: list[dict[str, Any]] = []
        self._images: dict[str, FirmwareImage] = {}

    # Images du fabricant

    def _release(self, name: str, target: FirmwareTarget, version: str, body: bytes, recovery: bool = False) -> FirmwareImage:
        if name not in self._images:
            rule = self.policy.rule(self.scenario.profile, target)
            self._images[name] = release_image(target, version, body, self.keys, rule, allow_charge_below_cuvt=recovery)

        return self._images[name]

    def stock_bctrl_image(self) -> FirmwareImage:
        """Image BCTRL d'origine publiée par le fabricant pour le profil."""
        version = self.profile_config.bctrl_version
        body = encode_firmware_body(BctrlFirmware(version=version, code=stock_code(version)))

        return self._release("stock", FirmwareTarget.BCTRL, version, body)

    def recovery_bctrl_image(self) -> FirmwareImage:
        """Image BCTRL de récupération : seuils d'origine et charge permise sous cUVT."""
        version = self.profile_config.bctrl_version
        body = encode_firmware_body(BctrlFirmware(version=version, code=stock_code(version)))

        return self._release("recovery", FirmwareTarget.BCTRL, version, body, recovery=True)

    def drv_update_image(self) -> FirmwareImage:
        """Mise à jour officielle du DRV."""
        version = bump_version(self.profile_config.drv_version)

        return self._release("drv-update", FirmwareTarget.DRV, version, stock_code(f"drv-{version}"))

    # Boucle physique

    def start(self) -> None:
        """
        Planifie la boucle physique, l'échantillonnage des tensions, l'allumage par l'utilisateur et la
        chronologie du scénario.
        """
        self.kernel.every(self.scenario.tick_interval, self.tick, start=0, label="tick")
        self.kernel.every(self.config.kernel.trace_interval_ms, self.sample, start=0, label="trace")
        self.kernel.schedule(self.user.start, at=0, label="user-start")
        self.attack_scenario.setup(self)

    def tick(self) -> None:
        """
        Itération physique : décharge, dégradation, équilibrage et charge du pack, protections du BMON,
        puis boucles du BCTRL et du DRV.
        """
        dt = self.scenario.tick_interval
        pack = self.pack
        regs = self.bmon.regs

        external = self.drv.load_ma() if regs.discharge_enabled else 0.0
        pack.step_discharge(external + self.bctrl.current_ma(), dt)

        for group in pack.apply_undervolt_degradation(dt):
            self.event_log.append("BMON", EventKind.CELL_DEAD, group=group)

        if not regs.ship_mode and regs.cellbal_mask:
            pack.balance_step(regs.cellbal_mask)

        if self.charger.connected and self.bctrl.charging and regs.charge_enabled:
            pack.charge_step(self.charger.current_ma, dt, self.charger.target_cell_mv)

        self.bmon.protect_check()
        self.bctrl.tick()
        self.drv.tick(dt)

    def sample(self) -> None:
        voltages = self.pack.voltages
        row: dict[str, Any] = {schema_ids.T_MS: self.kernel.now}
        row.update({column: round(float(voltage), 3) for column, voltage in zip(schema_ids.VC_COLUMNS, voltages)})
        row[schema_ids.BATTLEVEL] = round(float(self.pack.compute_batt_level()), 3)
        row[schema_ids.SLEEPING] = bool(self.bctrl.state.sleep_mode)
        row[schema_ids.CHARGING] = bool(self.bctrl.charging)
        self.traces.append(row)

    def watch_final(self) -> None:
        """Arrête la simulation dès que le résultat du scénario est définitif."""
        self.kernel.every(
            FINAL_CHECK_INTERVAL_MS,
            lambda: self.kernel.stop() if self.attack_scenario.is_final(self) else None,
            start=FINAL_CHECK_INTERVAL_MS,
            label="final-check",
        )

    def run(self, early_stop: bool = False) -> None:
        """
        Exécute le scénario jusqu'à sa durée.

        :param early_stop: Arrête dès que le résultat est définitif (matrice).
        :type early_stop: bool
        """
        self.start()

        if early_stop:
            self.watch_final()

        self.kernel.run(until=self.scenario.duration)

        if self.bctrl.payload is not None:
            self.bctrl.payload.on_stop()

        self.user.stop()


@dataclass
class ScenarioRun:
    """
    Résultat complet d'un scénario.
    """

    scenario: ScenarioConfig
    """Le descripteur exécuté."""
    outcome: ScenarioOutcome
    """Le résultat évalué."""
    system: ScooterSystem = field(repr=False)
    """La trottinette simulée à la fin de l'exécution."""

    @property
    def event_log(self) -> EventLog:
        return self.system.event_log


def baseline_for(scenario: ScenarioConfig) -> ScenarioConfig:
    """
    Retourne le descripteur de l'exécution de référence : même graine, profil, contre-mesures et durée,
    sans attaque et avec l'utilisateur stationné.

    :param scenario: Le descripteur du scénario attaqué.
    :type scenario: ScenarioConfig
    :return: Le descripteur de référence.
    :rtype: ScenarioConfig
    """
    return scenario.model_copy(update={"attack": Attack.NONE, "user_behavior": UserBehavior.PARKED})


def run_scenario(
    scenario: ScenarioConfig,
    config: Optional[SimulationConfig] = None,
    capabilities: Optional[frozenset[Capability]] = None,
    early_stop: bool = False,
) -> ScenarioRun:
    """
    Exécute un scénario et évalue son résultat. Un scénario comparé à une référence (DES7) exécute
    d'abord l'exécution de référence.

    :param scenario: Le descripteur.
    :type scenario: ScenarioConfig
    :param config: La configuration, celle du fichier par défaut si absente.
    :type config: Optional[SimulationConfig]
    :param capabilities: Les capacités installées, sinon celles de l'attaque.
    :type capabilities: Optional[frozenset[Capability]]
    :param early_stop: Arrête dès que le résultat est définitif.
    :type early_stop: bool
    :return: Le résultat.
    :rtype: ScenarioRun
    """
    config = config or get_simulation_config(CONFIG_FILE)
    attack_scenario = FACTORY_ATTACK[scenario.attack](capabilities)
    baseline: Optional[dict[str, Any]] = None

    if attack_scenario.needs_baseline:
        LOGGER.info(f"Exécution de référence pour {scenario.label}.")
        baseline = run_scenario(baseline_for(scenario), config).outcome.metrics

    LOGGER.info(f"Exécution du scénario {scenario.label} ({scenario.duration} ms).")
    system = ScooterSystem(scenario, config, attack_scenario)
    system.run(early_stop=early_stop)

    return ScenarioRun(scenario=scenario, outcome=attack_scenario.evaluate(system, baseline), system=system)


def countermeasure_subsets() -> list[frozenset[Countermeasure]]:
    """
    Retourne les seize sous-ensembles de contre-mesures, du vide au complet.

    :return: Les sous-ensembles, par taille puis par ordre des contre-mesures.
    :rtype: list[frozenset[Countermeasure]]
    """
    members = list(Countermeasure)

    return [
        frozenset(subset) for size in range(len(members) + 1) for subset in itertools.combinations(members, size)
    ]


def matrix_scenarios(config: SimulationConfig, seed: Optional[int] = None) -> list[ScenarioConfig]:
    """
    Construit les descripteurs de la matrice attaques x profils x contre-mesures.

    :param config: La configuration.
    :type config: SimulationConfig
    :param seed: La graine, celle de la configuration si absente.
    :type seed: Optional[int]
    :return: Les descripteurs, dans l'ordre de la matrice.
    :rtype: list[ScenarioConfig]
    """
    matrix = config.matrix
    seed = matrix.seed if seed is None else seed
    scenarios: list[ScenarioConfig] = []

    for attack in MATRIX_ATTACKS:
        ubr = attack == Attack.UBR
        for profile in Profile:
            for subset in countermeasure_subsets():
                scenarios.append(
                    ScenarioConfig(
                        profile=profile,
                        countermeasures=subset,
                        attack=attack,
                        seed=seed,
                        duration=matrix.ubr_duration_ms if ubr else config.durations.for_attack(attack),
                        tick_interval=config.durations.tick_for_attack(attack),
                        initial_soc=matrix.ubr_initial_soc if ubr else 100.0,
                    )
                )

    return scenarios


def _run_matrix_cell(scenario: ScenarioConfig, config: SimulationConfig) -> ScenarioOutcome:
    return run_scenario(scenario, config, early_stop=True).outcome


def run_matrix(
    config: Optional[SimulationConfig] = None, seed: Optional[int] = None, workers: Optional[int] = None
) -> list[ScenarioOutcome]:
    """
    Exécute la matrice complète. Les scénarios sont indépendants; les résultats sont retournés dans
    l'ordre de la matrice quel que soit le nombre de processus.

    :param config: La configuration.
    :type config: Optional[SimulationConfig]
    :param seed: La graine commune.
    :type seed: Optional[int]
    :param workers: Le nombre de processus; 1 exécute la matrice dans le processus courant.
    :type workers: Optional[int]
    :return: Les résultats.
    :rtype: list[ScenarioOutcome]
    """
    config = config or get_simulation_config(CONFIG_FILE)
    scenarios = matrix_scenarios(config, seed)
    workers = workers if workers is not None else config.matrix.workers
    task = partial(_run_matrix_cell, config=config)

    LOGGER.info(f"Matrice de {len(scenarios)} scénarios ({workers or 'tous les'} processus).")

    if workers == 1:
        return [task(scenario) for scenario in scenarios]

    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(task, scenarios))


def flash_image(
    image: FirmwareImage, scenario: ScenarioConfig, config: Optional[SimulationConfig] = None
) -> Optional[EventRecord]:
    """
    Livre une image à travers le BTS d'une trottinette simulée et retourne la décision de son nœud
    cible.

    :param image: L'image.
    :type image: FirmwareImage
    :param scenario: Le descripteur (profil et contre-mesures).
    :type scenario: ScenarioConfig
    :param config: La configuration.
    :type config: Optional[SimulationConfig]
    :return: L'événement install-accepted, install-rejected ou update-rejected, None sans décision.
    :rtype: Optional[EventRecord]
    """
    config = config or get_simulation_config(CONFIG_FILE)
    system = ScooterSystem(scenario.model_copy(update={"attack": Attack.NONE}), config)
    node = image.target.name
    decisions = (EventKind.INSTALL_ACCEPTED, EventKind.INSTALL_REJECTED, EventKind.UPDATE_REJECTED)

    def decision() -> Optional[EventRecord]:
        return next(
            (record for record in system.event_log.records if record.kind in decisions and record.node == node),
            None,
        )

    system.start()
    system.kernel.schedule(
        lambda: system.user.install_image(image), at=config.timeline.attack_delivery_ms, label="flash"
    )
    system.kernel.every(
        FINAL_CHECK_INTERVAL_MS,
        lambda: system.kernel.stop() if decision() is not None else None,
        start=FINAL_CHECK_INTERVAL_MS,
        label="flash-check",
    )
    system.kernel.run(until=config.timeline.attack_delivery_ms + FLASH_TIMEOUT_MS)
    record = decision()

    LOGGER.info(f"Flashage de l'image {node} {image.version} : {record.kind if record else 'aucune décision'}.")

    return record
