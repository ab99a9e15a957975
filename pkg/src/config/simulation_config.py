"""
Module de configuration de la simulation.

Ce module contient les énumérations et les classes pydantic qui décrivent un scénario (profil, attaque,
contre-mesures, graine, durée) ainsi que les paramètres du modèle physique, du bus et de la chronologie
des scénarios chargés à partir du fichier TOML.
"""

from enum import StrEnum
from pathlib import Path
from typing import Optional, Any

from loguru import logger
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from .helper import load_config


LOGGER = logger.bind(name="BES-Simulation.Config.SimulationConfig")

SectionDict = dict[str, Any]

TICK_INTERVAL_MS: int = 100
TRACE_INTERVAL_MS: int = 1000
STATUS_INTERVAL_MS: int = 1000
MAX_SEED: int = 2**64

BUS_CAPACITY_FPS: int = 200
BUS_WINDOW_MS: int = 100
RATE_LIMIT_CAPACITY: int = 8
RATE_LIMIT_DRAIN_FPS: int = 40
FLOOD_MULTIPLIER: int = 10
CHUNK_SIZE: int = 40
CHUNK_SPACING_MS: int = 50
OBSERVATION_BUFFER: int = 4096

DEEP_RESERVE: float = 0.10
R1_PER_HOUR: float = 0.025
R2_PER_HOUR: float = 0.20
DF_GROWTH_PER_HOUR: float = 6.0
MAX_DEGRADATION: float = 4.0
DEAD_CAPACITY_FRACTION: float = 0.75
BALANCE_TRANSFER_MAH: float = 0.05
BALANCE_DISSIPATION: float = 0.02
INTERNAL_RESISTANCE_MOHM: float = 80.0
BCTRL_AWAKE_MA: float = 2.0
BCTRL_SLEEP_MA: float = 0.2
WEAK_GROUP: int = 4
WEAK_DRAIN_WEIGHT: float = 1.02
CHARGER_CURRENT_MA: float = 2000.0
CHARGER_VOLTAGE_MV: int = 42000

DRV_POLL_MS: int = 1000
BMS_TIMEOUT_MS: int = 3000
ERROR_POWER_OFF_MS: int = 10000
AUTO_OFF_MS: int = 15000
IDLE_SLEEP_MS: int = 5000
BEEP_INTERVAL_MS: int = 1000
BTS_REBOOT_MS: int = 150
POWER_CYCLE_WINDOW_MS: int = 60000
POWER_CYCLE_THRESHOLD: int = 3
USER_ACTIVITY_MS: int = 5000
SPOOF_RESPONSE_TIMEOUT_MS: int = 2000

RANSOM_URL: str = "t.ly/AaBbCc"

MILEAGE_KM: int = 433
LAST_TRAVEL_KM: int = 12
LAST_TRAVEL_MIN: int = 35
AVG_SPEED_KMH: int = 15
PASSWORD: str = "123456"


class Profile(StrEnum):
    """
    Énumération des profils de modèle de trottinette.
    """

    M365 = "m365"
    ES3 = "es3"


class Attack(StrEnum):
    """
    Énumération des scénarios d'attaque.
    """

    UBR = "ubr"
    UTI = "uti"
    DES1 = "des1"
    DES2 = "des2"
    DES3 = "des3"
    DES4 = "des4"
    DES5 = "des5"
    DES6 = "des6"
    DES7 = "des7"
    PLR = "plr"
    NONE = "none"

    @property
    def is_des(self) -> bool:
        """Indique si l'attaque est une variante de déni de service."""
        return self.value.startswith("des")


DES_VARIANTS: tuple[Attack, ...] = tuple(attack for attack in Attack if attack.is_des)


class Countermeasure(StrEnum):
    """
    Énumération des contre-mesures.
    """

    C1 = "c1"
    """Chiffrement TEA du micrologiciel BCTRL."""
    C2 = "c2"
    """Signature ECDSA du micrologiciel BCTRL."""
    C3 = "c3"
    """Canal sécurisé de type SCP03 sur le bus UART."""
    C4 = "c4"
    """Limitation de débit (seau percé) sur le bus UART."""


class UserBehavior(StrEnum):
    """
    Énumération des comportements de l'utilisateur scripté.
    """

    PRESENT = "present"
    PARKED = "parked"


def format_countermeasures(countermeasures: frozenset[Countermeasure]) -> str:
    """
    Retourne la représentation textuelle stable d'un ensemble de contre-mesures.

    :param countermeasures: L'ensemble des contre-mesures.
    :type countermeasures: frozenset[Countermeasure]
    :return: Les contre-mesures triées et jointes par '+', ou 'none'.
    :rtype: str
    """
    if not countermeasures:
        return "none"

    return "+".join(sorted(str(countermeasure) for countermeasure in countermeasures))


def parse_countermeasures(value: str | None) -> frozenset[Countermeasure]:
    """
    Convertit une liste séparée par des virgules en ensemble de contre-mesures.

    :param value: La liste textuelle (ex. 'c1,c2'), 'none' ou vide.
    :type value: str | None
    :return: L'ensemble des contre-mesures.
    :rtype: frozenset[Countermeasure]
    :raises ValueError: Si une contre-mesure est inconnue.
    """
    if value is None or value.strip().lower() in {"", "none"}:
        return frozenset()

    return frozenset(
        Countermeasure(item.strip().lower()) for item in value.replace("+", ",").split(",") if item.strip()
    )


class ScenarioConfig(BaseModel):
    """
    Descripteur d'une expérience : profil, contre-mesures, attaque, graine et durée.

    :param profile: Le profil du modèle.
    :type profile: Profile
    :param countermeasures: Les contre-mesures actives.
    :type countermeasures: frozenset[Countermeasure]
    :param attack: Le scénario d'attaque.
    :type attack: Attack
    :param seed: La graine du générateur pseudo-aléatoire (64 bits).
    :type seed: int
    :param duration: La durée virtuelle en millisecondes.
    :type duration: int
    :param tick_interval: La période de la boucle principale du BCTRL en millisecondes.
    :type tick_interval: int
    :param initial_soc: Le niveau de charge initial en pourcentage.
    :type initial_soc: float
    :param user_behavior: Le comportement de l'utilisateur, sinon celui du scénario.
    :type user_behavior: Optional[UserBehavior]
    """

    model_config = ConfigDict(frozen=True)

    profile: Profile = Profile.M365
    """Le profil du modèle."""
    countermeasures: frozenset[Countermeasure] = frozenset()
    """Les contre-mesures actives."""
    attack: Attack = Attack.NONE
    """Le scénario d'attaque."""
    seed: int = 0
    """La graine du générateur pseudo-aléatoire."""
    duration: int = 60000
    """La durée virtuelle en millisecondes."""
    tick_interval: int = TICK_INTERVAL_MS
    """La période de la boucle principale du BCTRL en millisecondes."""
    initial_soc: float = 100.0
    """Le niveau de charge initial en pourcentage."""
    user_behavior: Optional[UserBehavior] = None
    """Le comportement de l'utilisateur, sinon celui du scénario."""

    @field_validator("duration", "tick_interval")
    def validate_positive(cls, value: int) -> int:
        """
        Valide que la durée et la période sont strictement positives.

        :param value: La valeur à valider.
        :type value: int
        :return: La valeur validée.
        :rtype: int
        :raises ValueError: Si la valeur est inférieure ou égale à 0.
        """
        if value <= 0:
            raise ValueError("La durée et la période de la boucle doivent être supérieures à 0 ms.")

        return value

    @field_validator("seed")
    def validate_seed(cls, value: int) -> int:
        """
        Valide que la graine tient sur 64 bits non signés.

        :param value: La graine.
        :type value: int
        :return: La graine.
        :rtype: int
        :raises ValueError: Si la graine est hors de l'intervalle [0, 2^64).
        """
        if not 0 <= value < MAX_SEED:
            raise ValueError("La graine doit être comprise entre 0 et 2^64 - 1.")

        return value

    @field_validator("initial_soc")
    def validate_initial_soc(cls, value: float) -> float:
        """
        Valide que le niveau de charge initial est un pourcentage.

        :param value: Le niveau de charge.
        :type value: float
        :return: Le niveau de charge.
        :rtype: float
        :raises ValueError: Si le niveau est hors de [0, 100].
        """
        if not 0 <= value <= 100:
            raise ValueError("Le niveau de charge initial doit être compris entre 0 et 100 %.")

        return value

    @property
    def label(self) -> str:
        """Identifiant lisible du scénario."""
        return (
            f"{self.attack}/{self.profile}/{format_countermeasures(self.countermeasures)}/seed={self.seed}"
        )

    def has(self, countermeasure: Countermeasure) -> bool:
        """
        Indique si une contre-mesure est active.

        :param countermeasure: La contre-mesure.
        :type countermeasure: Countermeasure
        :return: Vrai si la contre-mesure est active.
        :rtype: bool
        """
        return countermeasure in self.countermeasures


class KernelConfig(BaseModel):
    """
    Paramètres du noyau de simulation et de l'échantillonnage.
    """

    trace_interval_ms: int = TRACE_INTERVAL_MS
    """La période d'échantillonnage des tensions exportées."""
    status_interval_ms: int = STATUS_INTERVAL_MS
    """La période des trames d'état du BCTRL vers le BTS."""

    @field_validator("trace_interval_ms", "status_interval_ms")
    def validate_interval(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("Les périodes d'échantillonnage doivent être supérieures à 0 ms.")

        return value


class BusConfig(BaseModel):
    """
    Paramètres du bus UART et des contre-mesures C3/C4.
    """

    capacity_fps: int = BUS_CAPACITY_FPS
    """La capacité du bus en trames par seconde."""
    window_ms: int = BUS_WINDOW_MS
    """La fenêtre de comptabilisation de la capacité."""
    rate_limit_capacity: int = RATE_LIMIT_CAPACITY
    """La capacité du seau percé (jetons) par émetteur."""
    rate_limit_drain_fps: int = RATE_LIMIT_DRAIN_FPS
    """Le débit de vidange du seau percé (jetons par seconde)."""
    flood_multiplier: int = FLOOD_MULTIPLIER
    """Le multiple de la capacité émis par l'inondation."""
    chunk_size: int = CHUNK_SIZE
    """La taille des fragments de mise à jour."""
    chunk_spacing_ms: int = CHUNK_SPACING_MS
    """L'intervalle entre deux fragments de mise à jour."""
    observation_buffer: int = OBSERVATION_BUFFER
    """Le nombre de trames conservées dans le journal d'observation de chaque nœud."""

    @field_validator("capacity_fps", "window_ms", "rate_limit_capacity", "rate_limit_drain_fps", "chunk_size")
    def validate_positive(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("Les paramètres du bus doivent être supérieurs à 0.")

        return value

    @field_validator("chunk_size")
    def validate_chunk_size(cls, value: int) -> int:
        if value > 48:
            raise ValueError("Les fragments doivent laisser 16 octets au canal sécurisé (maximum 48).")

        return value

    @property
    def window_capacity(self) -> int:
        """Le nombre de trames admises par fenêtre."""
        return max(1, self.capacity_fps * self.window_ms // 1000)


class BatteryModelConfig(BaseModel):
    """
    Paramètres du modèle de batterie et des charges.
    """

    deep_reserve: float = DEEP_RESERVE
    """La réserve de décharge profonde (fraction de la capacité nominale) entre 3600 mV et 0 mV."""
    r1_per_hour: float = R1_PER_HOUR
    """La perte de capacité par heure sous dUVT (fraction de la capacité nominale)."""
    r2_per_hour: float = R2_PER_HOUR
    """La perte de capacité par heure sous cUVT (fraction de la capacité nominale)."""
    df_growth_per_hour: float = DF_GROWTH_PER_HOUR
    """La vitesse de convergence du facteur de dégradation vers son maximum sous cUVT."""
    max_degradation: float = MAX_DEGRADATION
    """Le facteur de dégradation maximal."""
    dead_capacity_fraction: float = DEAD_CAPACITY_FRACTION
    """La capacité résiduelle d'un groupe mort."""
    balance_transfer_mah: float = BALANCE_TRANSFER_MAH
    """La charge transférée par cycle d'équilibrage."""
    balance_dissipation: float = BALANCE_DISSIPATION
    """La fraction dissipée lors d'un transfert d'équilibrage."""
    internal_resistance_mohm: float = INTERNAL_RESISTANCE_MOHM
    """La résistance interne d'un groupe, utilisée pour la tension mesurée sous charge."""
    bctrl_awake_ma: float = BCTRL_AWAKE_MA
    """La consommation du BCTRL éveillé."""
    bctrl_sleep_ma: float = BCTRL_SLEEP_MA
    """La consommation du BCTRL en veille."""
    weak_group: int = WEAK_GROUP
    """L'index (0 à 9) du groupe le plus faible."""
    weak_drain_weight: float = WEAK_DRAIN_WEIGHT
    """Le multiplicateur de décharge du groupe le plus faible."""
    charger_current_ma: float = CHARGER_CURRENT_MA
    """Le courant du chargeur."""
    charger_voltage_mv: int = CHARGER_VOLTAGE_MV
    """La tension du chargeur (pack)."""

    @field_validator("deep_reserve", "dead_capacity_fraction")
    def validate_fraction(cls, value: float) -> float:
        if not 0 < value < 1:
            raise ValueError("Les fractions du modèle de batterie doivent être comprises entre 0 et 1.")

        return value

    @field_validator("weak_group")
    def validate_weak_group(cls, value: int) -> int:
        if not 0 <= value < 10:
            raise ValueError("Le groupe faible doit être compris entre 0 et 9.")

        return value

    @model_validator(mode="after")
    def validate_rates(self) -> "BatteryModelConfig":
        if not 0 <= self.r1_per_hour < self.r2_per_hour:
            raise ValueError("Les taux de dégradation doivent respecter 0 <= r1 < r2.")

        if self.max_degradation < 1:
            raise ValueError("Le facteur de dégradation maximal doit être supérieur ou égal à 1.")

        return self


class ProfileConfig(BaseModel):
    """
    Paramètres propres à un profil de trottinette.
    """

    capacity_mah: float
    """La capacité du pack."""
    energy_wh: float
    """L'énergie du pack."""
    idle_load_ma: float
    """La charge de la trottinette allumée à l'arrêt."""
    fbd_load_ma: float
    """La charge supplémentaire imposée par la décharge rapide (feux, moteur en attente)."""
    drv_check_active: bool
    """Indique si le DRV vérifie sa tension d'alimentation (erreur 24)."""
    bts_version: str
    """La version du micrologiciel BTS installée."""
    drv_version: str
    """La version du micrologiciel DRV installée."""
    bctrl_version: str
    """La version du micrologiciel BCTRL installée."""
    model_code: str
    """Le préfixe de modèle du numéro de série DRV (6 caractères ASCII)."""

    @field_validator("capacity_mah", "energy_wh")
    def validate_capacity(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("La capacité et l'énergie du pack doivent être supérieures à 0.")

        return value

    @field_validator("model_code")
    def validate_model_code(cls, value: str) -> str:
        if len(value.encode("ascii")) != 6:
            raise ValueError("Le préfixe de modèle doit contenir exactement 6 caractères ASCII.")

        return value

    @property
    def fast_discharge_ma(self) -> float:
        """La charge totale pendant la décharge rapide."""
        return self.idle_load_ma + self.fbd_load_ma


PROFILES: dict[Profile, ProfileConfig] = {
    Profile.M365: ProfileConfig(
        capacity_mah=7800,
        energy_wh=300,
        idle_load_ma=400,
        fbd_load_ma=2200,
        drv_check_active=False,
        bts_version="1.4.3",
        drv_version="1.5.5",
        bctrl_version="1.2.1",
        model_code="16133/",
    ),
    Profile.ES3: ProfileConfig(
        capacity_mah=7650,
        energy_wh=275,
        idle_load_ma=300,
        fbd_load_ma=975,
        drv_check_active=True,
        bts_version="1.5.5",
        drv_version="0.1.9",
        bctrl_version="1.3.2",
        model_code="29181/",
    ),
}


class TimingConfig(BaseModel):
    """
    Paramètres temporels des nœuds.
    """

    drv_poll_ms: int = DRV_POLL_MS
    """La période d'interrogation du BCTRL par le DRV."""
    bms_timeout_ms: int = BMS_TIMEOUT_MS
    """Le délai sans réponse du BMS avant l'erreur 21."""
    error_power_off_ms: int = ERROR_POWER_OFF_MS
    """Le délai d'extinction après les erreurs 21 et 24."""
    auto_off_ms: int = AUTO_OFF_MS
    """Le délai d'inactivité avant l'extinction automatique."""
    idle_sleep_ms: int = IDLE_SLEEP_MS
    """Le délai sans trafic avant la mise en veille du BCTRL."""
    beep_interval_ms: int = BEEP_INTERVAL_MS
    """La période des bips de l'erreur 23."""
    bts_reboot_ms: int = BTS_REBOOT_MS
    """La durée d'un redémarrage du BTS."""
    power_cycle_window_ms: int = POWER_CYCLE_WINDOW_MS
    """La fenêtre de détection d'une boucle de redémarrages."""
    power_cycle_threshold: int = POWER_CYCLE_THRESHOLD
    """Le nombre de redémarrages dans la fenêtre signalant une boucle."""
    user_activity_ms: int = USER_ACTIVITY_MS
    """La période d'activité de l'utilisateur présent."""
    spoof_response_timeout_ms: int = SPOOF_RESPONSE_TIMEOUT_MS
    """Le délai d'attente d'une réponse à une lecture usurpée."""

    @field_validator("*")
    def validate_positive(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("Les paramètres temporels doivent être supérieurs à 0.")

        return value


class TimelineConfig(BaseModel):
    """
    Chronologie des scénarios.
    """

    attack_delivery_ms: int = 1000
    """L'instant de l'accès autorisé de l'attaquant et de la livraison du micrologiciel."""
    uti_retrack_ms: int = 60000
    """La période de republication du message Track."""
    uti_factory_reset_ms: int = 90000
    """L'instant de la réinitialisation d'usine pendant UTI."""
    uti_drv_update_ms: int = 150000
    """L'instant de la mise à jour du micrologiciel DRV pendant UTI."""
    plr_rotation_ms: int = 300
    """L'intervalle entre deux noms pendant PLR."""
    des2_power_on_retry_ms: int = 10000
    """La période des tentatives d'allumage pendant DES2."""
    des4_unlock_retry_ms: int = 5000
    """La période des tentatives de déverrouillage pendant DES4."""
    des4_reset_interval_ms: int = 10000
    """La période des commandes de réinitialisation usurpées pendant DES4."""
    des5_charger_delay_ms: int = 5000
    """Le délai entre la livraison et le branchement du chargeur pendant DES5."""
    des6_e24_delay_ms: int = 15000
    """Le délai entre l'erreur 23 et l'erreur 24 forgées pendant DES6."""
    ubr_charge_attempt_ms: int = 60000
    """Le délai entre la révélation de la rançon et le branchement du chargeur par la victime."""

    @field_validator("*")
    def validate_positive(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("Les instants de la chronologie doivent être supérieurs à 0.")

        return value


class DurationConfig(BaseModel):
    """
    Durées par défaut des scénarios lorsque la ligne de commande n'en fournit pas.
    """

    ubr: int = 12_600_000
    uti: int = 240_000
    des: int = 40_000
    plr: int = 10_000
    none: int = 60_000
    tick: int = TICK_INTERVAL_MS
    """La période par défaut de la boucle principale du BCTRL."""
    ubr_tick: int = 1000
    """La période de la boucle principale pour UBR, dont les exécutions durent plusieurs heures."""

    @field_validator("*")
    def validate_positive(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("Les durées et les périodes doivent être supérieures à 0.")

        return value

    def for_attack(self, attack: Attack) -> int:
        """
        Retourne la durée par défaut d'une attaque.

        :param attack: L'attaque.
        :type attack: Attack
        :return: La durée en millisecondes.
        :rtype: int
        """
        if attack.is_des:
            return self.des

        return getattr(self, str(attack))

    def tick_for_attack(self, attack: Attack) -> int:
        """
        Retourne la période par défaut de la boucle principale pour une attaque.

        :param attack: L'attaque.
        :type attack: Attack
        :return: La période en millisecondes.
        :rtype: int
        """
        return self.ubr_tick if attack == Attack.UBR else self.tick


class UbrSettings(BaseModel):
    """
    Paramètres du rançongiciel UBR.
    """

    ransom_url: str = RANSOM_URL
    """Le lien raccourci annoncé en BLE."""
    payment_delay_ms: Optional[int] = None
    """Le délai entre la révélation et le paiement de la victime (aucun paiement si absent)."""

    @field_validator("ransom_url")
    def validate_ransom_url(cls, value: str) -> str:
        if len(value.encode()) > 14:
            raise ValueError("Le lien de rançon doit tenir dans le nom BLE (14 octets).")

        return value


class PlrSettings(BaseModel):
    """
    Paramètres du craquage du NIP.
    """

    crack_mode: str = "table"
    """Le mode de craquage : 'table' ou 'exhaustive'."""

    @field_validator("crack_mode")
    def validate_crack_mode(cls, value: str) -> str:
        if value not in {"table", "exhaustive"}:
            raise ValueError("Le mode de craquage doit être 'table' ou 'exhaustive'.")

        return value


class DrvDataConfig(BaseModel):
    """
    Données stockées dans le DRV.
    """

    mileage_km: int = MILEAGE_KM
    last_travel_km: int = LAST_TRAVEL_KM
    last_travel_min: int = LAST_TRAVEL_MIN
    avg_speed_kmh: int = AVG_SPEED_KMH
    password: str = PASSWORD
    """Le mot de passe à six chiffres de l'application."""

    @field_validator("mileage_km", "last_travel_km", "last_travel_min", "avg_speed_kmh")
    def validate_u16(cls, value: int) -> int:
        if not 0 <= value <= 0xFFFF:
            raise ValueError("Les compteurs du DRV sont codés sur 16 bits.")

        return value

    @field_validator("password")
    def validate_password(cls, value: str) -> str:
        if len(value) != 6 or not value.isdigit():
            raise ValueError("Le mot de passe doit contenir exactement six chiffres.")

        return value


class MatrixConfig(BaseModel):
    """
    Paramètres de la matrice attaques x contre-mesures.
    """

    seed: int = 7
    ubr_initial_soc: float = 2.0
    """Le niveau de charge initial des scénarios UBR de la matrice."""
    ubr_duration_ms: int = 1_800_000
    """La durée des scénarios UBR de la matrice."""
    workers: Optional[int] = None
    """Le nombre de processus; None utilise le nombre de processeurs."""


class SimulationConfig(BaseModel):
    """
    Configuration complète de la simulation.
    """

    kernel: KernelConfig = KernelConfig()
    bus: BusConfig = BusConfig()
    battery: BatteryModelConfig = BatteryModelConfig()
    profiles: dict[Profile, ProfileConfig] = PROFILES
    timing: TimingConfig = TimingConfig()
    timeline: TimelineConfig = TimelineConfig()
    durations: DurationConfig = DurationConfig()
    ubr: UbrSettings = UbrSettings()
    plr: PlrSettings = PlrSettings()
    drv_data: DrvDataConfig = DrvDataConfig()
    matrix: MatrixConfig = MatrixConfig()

    def profile(self, profile: Profile) -> ProfileConfig:
        """
        Retourne la configuration d'un profil.

        :param profile: Le profil.
        :type profile: Profile
        :return: La configuration du profil.
        :rtype: ProfileConfig
        """
        return self.profiles[profile]


def build_profiles(section: SectionDict) -> dict[Profile, ProfileConfig]:
    """
    Fusionne les profils du fichier de configuration avec les profils par défaut.

    :param section: La section 'Profiles' du fichier TOML.
    :type section: SectionDict
    :return: Les profils.
    :rtype: dict[Profile, ProfileConfig]
    """
    profiles: dict[Profile, ProfileConfig] = dict(PROFILES)

    for name, values in (section or {}).items():
        profile = Profile(name.lower())
        profiles[profile] = ProfileConfig(**{**profiles[profile].model_dump(), **values})

    return profiles


def get_simulation_config(config_file: Optional[Path]) -> SimulationConfig:
    """
    Retourne la configuration de la simulation.

    :param config_file: Le chemin du fichier de configuration.
    :type config_file: Optional[Path]
    :return: La configuration de la simulation.
    :rtype: SimulationConfig
    """
    config_data: dict = load_config(config_file=config_file)

    LOGGER.debug("Initialisation de la configuration de la simulation.")

    simulation: SectionDict = config_data.get("SIMULATION", {})
    scenario: SectionDict = config_data.get("SCENARIO", {})

    kernel_config: SectionDict = simulation.get("kernel")
    bus_config: SectionDict = simulation.get("bus")
    battery_config: SectionDict = simulation.get("battery")
    timing_config: SectionDict = simulation.get("timing")
    timeline_config: SectionDict = scenario.get("timeline")
    duration_config: SectionDict = scenario.get("duration")
    ubr_config: SectionDict = scenario.get("ubr")
    plr_config: SectionDict = scenario.get("plr")
    drv_config: SectionDict = scenario.get("drv")
    matrix_config: SectionDict = scenario.get("matrix")

    return SimulationConfig(
        kernel=KernelConfig(**kernel_config) if kernel_config else KernelConfig(),
        bus=BusConfig(**bus_config) if bus_config else BusConfig(),
        battery=(BatteryModelConfig(**battery_config) if battery_config else BatteryModelConfig()),
        profiles=build_profiles(config_data.get("PROFILES", {})),
        timing=TimingConfig(**timing_config) if timing_config else TimingConfig(),
        timeline=(TimelineConfig(**timeline_config) if timeline_config else TimelineConfig()),
        durations=(DurationConfig(**duration_config) if duration_config else DurationConfig()),
        ubr=UbrSettings(**ubr_config) if ubr_config else UbrSettings(),
        plr=PlrSettings(**plr_config) if plr_config else PlrSettings(),
        drv_data=DrvDataConfig(**drv_config) if drv_config else DrvDataConfig(),
        matrix=MatrixConfig(**matrix_config) if matrix_config else MatrixConfig(),
    )
