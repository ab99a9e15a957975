"""
Module du modèle électrochimique du pack de batteries.

Ce module contient le pack 10s3p sous forme de tableaux numpy (un élément par groupe de cellules) et les
opérations appliquées à chaque cycle : décharge, dégradation en sous-tension, équilibrage, charge et
calcul du niveau de batterie.

La charge est comptée en mAh par cellule, relativement au point 0 % (3600 mV). Au-dessus de ce point, la
tension suit une table de tension à vide sur la fraction de la capacité effective; en dessous, elle
descend linéairement jusqu'à 0 mV sur une réserve profonde exprimée en fraction de la capacité nominale.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from loguru import logger

from config import BatteryModelConfig
from .pack_models import (
    CELL_VOLTAGE_CEILING_MV,
    CELL_VOLTAGE_MAX_MV,
    CELL_VOLTAGE_MIN_MV,
    CellGroup,
    OCV_MV_KNOTS,
    OCV_SOC_KNOTS,
    PackSpec,
    Thresholds,
)

LOGGER = logger.bind(name="BES-Simulation.Battery.BatteryPack")

MS_PER_HOUR: float = 3_600_000.0
DEAD_EPSILON_MAH: float = 1e-9


def open_circuit_voltage(
    charge_mah: np.ndarray,
    effective_mah: np.ndarray,
    nominal_mah: float,
    deep_reserve: float,
) -> np.ndarray:
    """
    Calcule la tension à vide de chaque groupe.

    :param charge_mah: La charge par cellule relative au point 0 %.
    :type charge_mah: np.ndarray
    :param effective_mah: La capacité effective par groupe.
    :type effective_mah: np.ndarray
    :param nominal_mah: La capacité nominale d'une cellule.
    :type nominal_mah: float
    :param deep_reserve: La réserve profonde en fraction de la capacité nominale.
    :type deep_reserve: float
    :return: Les tensions en millivolts.
    :rtype: np.ndarray
    """
    upper = np.interp(charge_mah / effective_mah, OCV_SOC_KNOTS, OCV_MV_KNOTS)
    lower = CELL_VOLTAGE_MIN_MV * (1.0 + charge_mah / (nominal_mah * deep_reserve))

    return np.where(charge_mah >= 0.0, upper, np.clip(lower, 0.0, CELL_VOLTAGE_MIN_MV))


def soc_fraction_for_level(level_pct: float) -> float:
    """
    Retourne la fraction de capacité effective correspondant à un niveau de batterie.

    :param level_pct: Le niveau de batterie en pourcentage.
    :type level_pct: float
    :return: La fraction de capacité (0 à 1).
    :rtype: float
    """
    voltage = CELL_VOLTAGE_MIN_MV + (CELL_VOLTAGE_MAX_MV - CELL_VOLTAGE_MIN_MV) * level_pct / 100.0

    return float(np.interp(voltage, OCV_MV_KNOTS, OCV_SOC_KNOTS))


def compute_batt_level(voltages_mv: Sequence[float] | np.ndarray) -> float:
    """
    Calcule le niveau de batterie : interpolation linéaire de la tension moyenne de [3600, 4200] mV vers
    [0, 100] %, bornée.

    :param voltages_mv: Les tensions des groupes.
    :type voltages_mv: Sequence[float] | np.ndarray
    :return: Le niveau en pourcentage.
    :rtype: float
    """
    voltages = np.asarray(voltages_mv, dtype=float)

    if voltages.size == 0:
        return 0.0

    level = (voltages.mean() - CELL_VOLTAGE_MIN_MV) / (CELL_VOLTAGE_MAX_MV - CELL_VOLTAGE_MIN_MV) * 100.0

    return float(np.clip(level, 0.0, 100.0))


@dataclass
class BatteryPack:
    """
    Pack de batteries à dix groupes en série.
    """

    spec: PackSpec
    """La description statique du pack."""
    params: BatteryModelConfig
    """Les paramètres du modèle."""
    thresholds: Thresholds
    """Les seuils de tension."""
    charge_mah: np.ndarray
    """La charge par cellule de chaque groupe relative au point 0 %."""
    drain_weights: np.ndarray
    """Le multiplicateur de décharge propre à chaque groupe (dispersion de production)."""
    effective_mah: np.ndarray = field(default=None)
    """La capacité effective de chaque groupe."""
    degradation: np.ndarray = field(default=None)
    """Le facteur de dégradation de chaque groupe."""
    dead: np.ndarray = field(default=None)
    """Les groupes morts."""
    last_load_ma: float = 0.0
    """Le dernier courant de décharge appliqué (lecture ampèremétrique du BMON)."""
    _voltage_cache: Optional[tuple[bytes, np.ndarray]] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        groups = self.spec.cell_groups

        if self.effective_mah is None:
            self.effective_mah = np.full(groups, self.nominal_mah)
        if self.degradation is None:
            self.degradation = np.ones(groups)
        if self.dead is None:
            self.dead = np.zeros(groups, dtype=bool)

    @classmethod
    def from_profile(
        cls,
        spec: PackSpec,
        params: BatteryModelConfig,
        thresholds: Optional[Thresholds] = None,
        initial_soc: float = 100.0,
        uniform: bool = False,
    ) -> "BatteryPack":
        """
        Construit un pack neuf au niveau de charge demandé.

        :param spec: La description du pack.
        :type spec: PackSpec
        :param params: Les paramètres du modèle.
        :type params: BatteryModelConfig
        :param thresholds: Les seuils de tension.
        :type thresholds: Optional[Thresholds]
        :param initial_soc: Le niveau de batterie initial en pourcentage.
        :type initial_soc: float
        :param uniform: Ignore la dispersion du groupe faible.
        :type uniform: bool
        :return: Le pack.
        :rtype: BatteryPack
        """
        weights = np.ones(spec.cell_groups)

        if not uniform:
            weights[params.weak_group] = params.weak_drain_weight

        charge = np.full(spec.cell_groups, soc_fraction_for_level(initial_soc) * spec.cell_capacity_mah)

        return cls(
            spec=spec,
            params=params,
            thresholds=thresholds or Thresholds(),
            charge_mah=charge,
            drain_weights=weights,
        )

    @property
    def nominal_mah(self) -> float:
        """La capacité nominale d'une cellule."""
        return self.spec.cell_capacity_mah

    @property
    def floor_mah(self) -> float:
        """La charge correspondant à 0 mV."""
        return -self.params.deep_reserve * self.nominal_mah

    @property
    def voltages(self) -> np.ndarray:
        """Les tensions à vide des groupes en millivolts (lecture seule, recalculées si l'état change)."""
        key = self.charge_mah.tobytes() + self.effective_mah.tobytes() + self.dead.tobytes()

        if self._voltage_cache is not None and self._voltage_cache[0] == key:
            return self._voltage_cache[1]

        voltages = np.where(
            self.dead,
            0.0,
            open_circuit_voltage(self.charge_mah, self.effective_mah, self.nominal_mah, self.params.deep_reserve),
        )
        voltages.flags.writeable = False
        self._voltage_cache = (key, voltages)

        return voltages

    @property
    def live(self) -> np.ndarray:
        """Les groupes vivants."""
        return ~self.dead

    def voltage(self, index: int) -> float:
        """
        Retourne la tension d'un groupe.

        :param index: Le numéro du groupe (1 à 10).
        :type index: int
        :return: La tension en millivolts.
        :rtype: float
        """
        return float(self.voltages[index - 1])

    @property
    def total_charge_mah(self) -> float:
        """La charge totale du pack par rapport au point 0 %."""
        return float(self.charge_mah.sum())

    def step_discharge(self, load_ma: float, dt_ms: int) -> "BatteryPack":
        """
        Décharge le pack : chaque groupe perd load·dt·facteur de dégradation/parallélisme (pondéré par la
        dispersion du groupe). Un groupe ne descend pas sous 0 mV.

        :param load_ma: Le courant de décharge du pack.
        :type load_ma: float
        :param dt_ms: La durée en millisecondes virtuelles.
        :type dt_ms: int
        :return: Le pack.
        :rtype: BatteryPack
        :raises ValueError: Si la durée est nulle ou négative.
        """
        if dt_ms <= 0:
            raise ValueError("La durée d'un pas de décharge doit être supérieure à 0.")

        self.last_load_ma = load_ma

        if load_ma <= 0:
            return self

        drawn = (
            load_ma / self.spec.parallel_per_group * (dt_ms / MS_PER_HOUR) * self.degradation * self.drain_weights
        )
        self.charge_mah = np.where(self.dead, self.charge_mah, np.maximum(self.charge_mah - drawn, self.floor_mah))

        return self

    def apply_undervolt_degradation(self, dt_ms: int) -> list[int]:
        """
        Applique la dégradation irréversible des groupes en sous-tension.

        Sous dUVT, la capacité effective décroît au taux r1; sous cUVT, au taux r2 et le facteur de
        dégradation converge vers son maximum. À 0 mV, le groupe meurt : capacité à 75 % du nominal et
        facteur de dégradation maximal.

        :param dt_ms: La durée écoulée.
        :type dt_ms: int
        :return: Les numéros (1 à 10) des groupes morts pendant ce pas.
        :rtype: list[int]
        """
        voltages = self.voltages
        hours = dt_ms / MS_PER_HOUR
        floor_capacity = self.params.dead_capacity_fraction * self.nominal_mah

        below_critical = (voltages < self.thresholds.c_uvt) & self.live
        below_dangerous = (voltages < self.thresholds.d_uvt) & self.live

        if below_dangerous.any():
            rate = np.where(
                below_critical,
                self.params.r2_per_hour,
                np.where(below_dangerous, self.params.r1_per_hour, 0.0),
            )
            decayed = np.maximum(self.effective_mah - rate * self.nominal_mah * hours, floor_capacity)
            self.effective_mah = np.minimum(self.effective_mah, decayed)

            relax = 1.0 - np.exp(-self.params.df_growth_per_hour * hours)
            grown = self.degradation + (self.params.max_degradation - self.degradation) * relax
            self.degradation = np.where(below_critical, np.maximum(self.degradation, grown), self.degradation)

        newly_dead = self.live & (self.charge_mah <= self.floor_mah + DEAD_EPSILON_MAH)

        if newly_dead.any():
            self.dead = self.dead | newly_dead
            self.charge_mah = np.where(newly_dead, self.floor_mah, self.charge_mah)
            self.effective_mah = np.where(
                newly_dead, np.minimum(self.effective_mah, floor_capacity), self.effective_mah
            )
            self.degradation = np.where(newly_dead, self.params.max_degradation, self.degradation)
            LOGGER.debug(f"Groupes morts : {(np.flatnonzero(newly_dead) + 1).tolist()}.")

        return (np.flatnonzero(newly_dead) + 1).tolist()

    def delta_mv(self) -> float:
        """
        Retourne l'écart de tension maximal entre groupes vivants.

        :return: L'écart en millivolts.
        :rtype: float
        """
        voltages = self.voltages[self.live]

        return float(voltages.max() - voltages.min()) if voltages.size else 0.0

    def balance_step(self, cellbal_mask: int) -> float:
        """
        Effectue un cycle d'équilibrage : tant que l'écart dépasse cLBD, une quantité fixe de charge passe
        du groupe le plus haut (parmi ceux sélectionnés par CELLBAL) au groupe le plus bas, moins une
        dissipation.

        :param cellbal_mask: Le masque des groupes en équilibrage (bit 0 = groupe 1).
        :type cellbal_mask: int
        :return: La charge transférée en mAh.
        :rtype: float
        """
        if not cellbal_mask or self.delta_mv() < self.thresholds.c_lbd:
            return 0.0

        voltages = self.voltages
        selected = np.array([(cellbal_mask >> index) & 1 for index in range(self.spec.cell_groups)], dtype=bool)
        sources = selected & self.live

        if not sources.any():
            return 0.0

        source = int(np.argmax(np.where(sources, voltages, -np.inf)))
        sink = int(np.argmin(np.where(self.live, voltages, np.inf)))

        if source == sink:
            return 0.0

        transfer = self.params.balance_transfer_mah
        self.charge_mah[source] -= transfer
        self.charge_mah[sink] += transfer * (1.0 - self.params.balance_dissipation)

        return transfer

    def charge_step(self, current_ma: float, dt_ms: int, target_cell_mv: float) -> float:
        """
        Charge les groupes vivants à courant constant jusqu'à la tension cible par cellule.

        :param current_ma: Le courant du chargeur.
        :type current_ma: float
        :param dt_ms: La durée.
        :type dt_ms: int
        :param target_cell_mv: La tension cible par cellule (tension du chargeur / 10).
        :type target_cell_mv: float
        :return: La charge ajoutée en mAh (par cellule, somme des groupes).
        :rtype: float
        """
        if current_ma <= 0 or dt_ms <= 0:
            return 0.0

        target = min(target_cell_mv, CELL_VOLTAGE_CEILING_MV)
        charging = self.live & (self.voltages < target)
        added = current_ma / self.spec.parallel_per_group * (dt_ms / MS_PER_HOUR)
        self.charge_mah = np.where(charging, self.charge_mah + added, self.charge_mah)

        return float(added * charging.sum())

    def compute_batt_level(self) -> float:
        """
        Calcule le niveau de batterie du pack.

        :return: Le niveau en pourcentage.
        :rtype: float
        """
        return compute_batt_level(self.voltages)

    def check_cell_health(self) -> list[int]:
        """
        Retourne les groupes morts.

        :return: Les numéros (1 à 10) des groupes morts.
        :rtype: list[int]
        """
        return (np.flatnonzero(self.dead) + 1).tolist()

    def autonomy_fraction(self) -> float:
        """
        Retourne l'autonomie relative à un pack neuf : le groupe le plus faible borne la durée de roulage
        (capacité effective divisée par le facteur de dégradation).

        :return: L'autonomie relative (0 à 1).
        :rtype: float
        """
        return float(np.min(self.effective_mah / (self.degradation * self.nominal_mah)))

    def autonomy_loss_pct(self) -> float:
        """
        Retourne la perte d'autonomie par rapport à un pack neuf.

        :return: La perte en pourcentage.
        :rtype: float
        """
        return 100.0 * (1.0 - self.autonomy_fraction())

    def min_live_voltage(self) -> float:
        """
        Retourne la tension minimale des groupes vivants.

        :return: La tension en millivolts, 0 si aucun groupe n'est vivant.
        :rtype: float
        """
        voltages = self.voltages[self.live]

        return float(voltages.min()) if voltages.size else 0.0

    def cell_groups(self) -> list[CellGroup]:
        """
        Retourne l'instantané de chaque groupe.

        :return: Les groupes.
        :rtype: list[CellGroup]
        """
        voltages = self.voltages

        return [
            CellGroup(
                index=index + 1,
                voltage=float(voltages[index]),
                nominal_capacity=self.nominal_mah,
                effective_capacity=float(self.effective_mah[index]),
                degradation_factor=float(self.degradation[index]),
                dead=bool(self.dead[index]),
            )
            for index in range(self.spec.cell_groups)
        ]
