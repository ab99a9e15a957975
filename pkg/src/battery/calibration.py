"""
Module de calibration du modèle de batterie.

Ce module contient les simulations simplifiées (pack seul, pas de temps grossier) qui servent à ajuster
la charge nominale d'un profil et le taux de dégradation r1 avec scipy, à partir des deux cibles
mesurées : le M365 se vide en trois heures et le ES3 perd environ 10 % d'autonomie en dix heures de
décharge profonde interrompue par l'erreur 24.
"""

from dataclasses import dataclass

import numpy as np
from loguru import logger
from scipy.optimize import brentq

from config import BatteryModelConfig, Profile, ProfileConfig, SimulationConfig
from .battery_pack import BatteryPack, MS_PER_HOUR
from .pack_models import PackSpec, Thresholds

LOGGER = logger.bind(name="BES-Simulation.Battery.Calibration")

CALIBRATION_STEP_MS: int = 10_000
EMPTY_TARGET_HOURS: dict[Profile, float] = {Profile.M365: 3.0, Profile.ES3: 6.0}
"""Le temps de décharge complète sous la charge nominale de chaque profil."""
ES3_LOSS_TARGET_PCT: float = 10.0
ES3_LOSS_HORIZON_H: float = 10.0
M365_LOSS_TARGET_PCT: float = 50.0
M365_LOSS_HORIZON_H: float = 3.5


@dataclass(frozen=True)
class UbrDischargeResult:
    """
    Résultat d'une décharge profonde simplifiée.
    """

    autonomy_loss_pct: float
    """La perte d'autonomie en fin de simulation."""
    dead_cells: list[int]
    """Les groupes morts."""
    e24_hour: float | None
    """L'instant de l'erreur 24 en heures, si elle survient."""
    min_voltage_mv: float
    """La tension minimale atteinte par un groupe vivant."""


@dataclass(frozen=True)
class CalibrationReport:
    """
    Constantes ajustées par la calibration.
    """

    load_ma: dict[Profile, float]
    """La charge totale qui vide chaque profil dans le temps cible."""
    r1_per_hour: float
    """Le taux de dégradation sous dUVT ajusté sur la cible du ES3."""
    m365_loss_pct: float
    """La perte d'autonomie du M365 après 3,5 heures avec les constantes courantes."""
    es3_loss_pct: float
    """La perte d'autonomie du ES3 après 10 heures avec r1 ajusté."""


def time_to_empty_hours(
    profile: ProfileConfig, params: BatteryModelConfig, load_ma: float, step_ms: int = CALIBRATION_STEP_MS
) -> float:
    """
    Simule un pack uniforme sous charge constante et retourne l'instant où le niveau atteint 0 %.

    :param profile: Le profil.
    :type profile: ProfileConfig
    :param params: Les paramètres du modèle.
    :type params: BatteryModelConfig
    :param load_ma: La charge.
    :type load_ma: float
    :param step_ms: Le pas de temps.
    :type step_ms: int
    :return: Le temps de décharge en heures (interpolé dans le dernier pas).
    :rtype: float
    """
    pack = BatteryPack.from_profile(PackSpec.from_profile(profile), params, initial_soc=100.0, uniform=True)
    elapsed_ms = 0
    previous_level = pack.compute_batt_level()

    while previous_level > 0.0:
        pack.step_discharge(load_ma, step_ms)
        elapsed_ms += step_ms
        level = pack.compute_batt_level()

        if level <= 0.0:
            fraction = previous_level / (previous_level - level) if previous_level > level else 1.0
            return (elapsed_ms - step_ms + fraction * step_ms) / MS_PER_HOUR

        previous_level = level

    return elapsed_ms / MS_PER_HOUR


def fit_load_ma(profile: ProfileConfig, params: BatteryModelConfig, target_hours: float) -> float:
    """
    Ajuste la charge constante qui vide le pack dans le temps cible.

    :param profile: Le profil.
    :type profile: ProfileConfig
    :param params: Les paramètres du modèle.
    :type params: BatteryModelConfig
    :param target_hours: Le temps cible.
    :type target_hours: float
    :return: La charge en mA.
    :rtype: float
    """
    return float(
        brentq(lambda load: time_to_empty_hours(profile, params, load) - target_hours, 100.0, 20_000.0, xtol=0.5)
    )


def simulate_ubr_discharge(
    profile: ProfileConfig,
    params: BatteryModelConfig,
    hours: float,
    initial_soc: float = 100.0,
    step_ms: int = CALIBRATION_STEP_MS,
) -> UbrDischargeResult:
    """
    Simule la décharge du rançongiciel sur le pack seul : charge rapide tant que la trottinette est
    allumée, consommation du BCTRL seul après l'extinction par l'erreur 24 (si le profil la vérifie).

    :param profile: Le profil.
    :type profile: ProfileConfig
    :param params: Les paramètres du modèle.
    :type params: BatteryModelConfig
    :param hours: L'horizon en heures.
    :type hours: float
    :param initial_soc: Le niveau initial.
    :type initial_soc: float
    :param step_ms: Le pas de temps.
    :type step_ms: int
    :return: Le résultat.
    :rtype: UbrDischargeResult
    """
    thresholds = Thresholds()
    pack = BatteryPack.from_profile(PackSpec.from_profile(profile), params, thresholds, initial_soc)
    load_on = profile.fast_discharge_ma + params.bctrl_awake_ma
    sag_mv = load_on * params.internal_resistance_mohm / 1000.0

    e24_ms: int | None = None
    elapsed_ms = 0
    min_voltage = float(pack.min_live_voltage())

    while elapsed_ms < hours * MS_PER_HOUR:
        scooter_on = e24_ms is None or elapsed_ms < e24_ms + 10_000
        pack.step_discharge(load_on if scooter_on else params.bctrl_awake_ma, step_ms)
        pack.apply_undervolt_degradation(step_ms)
        elapsed_ms += step_ms
        min_voltage = min(min_voltage, pack.min_live_voltage() if pack.live.any() else 0.0)

        if profile.drv_check_active and e24_ms is None and pack.min_live_voltage() - sag_mv < thresholds.c_uvt:
            e24_ms = elapsed_ms

    return UbrDischargeResult(
        autonomy_loss_pct=pack.autonomy_loss_pct(),
        dead_cells=pack.check_cell_health(),
        e24_hour=None if e24_ms is None else e24_ms / MS_PER_HOUR,
        min_voltage_mv=min_voltage,
    )


def fit_r1(profile: ProfileConfig, params: BatteryModelConfig, target_loss_pct: float, hours: float) -> float:
    """
    Ajuste le taux de dégradation sous dUVT pour atteindre la perte cible.

    :param profile: Le profil (avec vérification de l'erreur 24).
    :type profile: ProfileConfig
    :param params: Les paramètres du modèle.
    :type params: BatteryModelConfig
    :param target_loss_pct: La perte cible.
    :type target_loss_pct: float
    :param hours: L'horizon.
    :type hours: float
    :return: Le taux r1 par heure.
    :rtype: float
    """

    def residual(r1: float) -> float:
        trial = params.model_copy(update={"r1_per_hour": r1})
        return simulate_ubr_discharge(profile, trial, hours).autonomy_loss_pct - target_loss_pct

    return float(brentq(residual, 1e-4, params.r2_per_hour - 1e-4, xtol=1e-5))


def calibrate(config: SimulationConfig) -> CalibrationReport:
    """
    Exécute la calibration complète.

    :param config: La configuration de la simulation.
    :type config: SimulationConfig
    :return: Le rapport de calibration.
    :rtype: CalibrationReport
    """
    params = config.battery

    loads = {
        profile: fit_load_ma(config.profile(profile), params, EMPTY_TARGET_HOURS[profile]) for profile in Profile
    }
    LOGGER.info(f"Charges ajustées : {', '.join(f'{p}={v:.0f} mA' for p, v in loads.items())}.")

    r1 = fit_r1(config.profile(Profile.ES3), params, ES3_LOSS_TARGET_PCT, ES3_LOSS_HORIZON_H)
    LOGGER.info(f"Taux r1 ajusté : {r1:.4f} par heure.")

    fitted = params.model_copy(update={"r1_per_hour": r1})
    m365 = simulate_ubr_discharge(config.profile(Profile.M365), fitted, M365_LOSS_HORIZON_H)
    es3 = simulate_ubr_discharge(config.profile(Profile.ES3), fitted, ES3_LOSS_HORIZON_H)

    if m365.autonomy_loss_pct < M365_LOSS_TARGET_PCT:
        LOGGER.warning(
            f"La perte du M365 ({m365.autonomy_loss_pct:.1f} %) est sous la cible de {M365_LOSS_TARGET_PCT} %."
        )

    return CalibrationReport(
        load_ma={profile: float(np.round(load, 1)) for profile, load in loads.items()},
        r1_per_hour=r1,
        m365_loss_pct=m365.autonomy_loss_pct,
        es3_loss_pct=es3.autonomy_loss_pct,
    )
