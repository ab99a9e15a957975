"""
Module des modèles de données du pack de batteries.

Ce module contient la description statique d'un pack (PackSpec), les seuils de tension (Thresholds) et
l'instantané d'un groupe de cellules (CellGroup).
"""

from dataclasses import dataclass

from config import ProfileConfig

CELL_GROUPS: int = 10
"""Le nombre de groupes de cellules en série."""
PARALLEL_PER_GROUP: int = 3
"""Le nombre de cellules en parallèle par groupe."""

CELL_VOLTAGE_MAX_MV: int = 4200
"""La tension d'une cellule pleine."""
CELL_VOLTAGE_MIN_MV: int = 3600
"""La tension d'une cellule vide (0 %)."""
CELL_VOLTAGE_CEILING_MV: int = 5000
"""La tension maximale représentable d'une cellule."""

OCV_SOC_KNOTS: tuple[float, ...] = (0.0, 0.6, 1.0, 1.25)
"""Les nœuds de la courbe de tension à vide (fraction de la capacité effective)."""
OCV_MV_KNOTS: tuple[float, ...] = (3600.0, 3900.0, 4200.0, 5000.0)
"""Les tensions correspondant aux nœuds de la courbe."""


@dataclass(frozen=True)
class PackSpec:
    """
    Description statique d'un pack 10s3p.
    """

    capacity_mah: float
    """La capacité du pack."""
    energy_wh: float
    """L'énergie du pack."""
    cell_groups: int = CELL_GROUPS
    """Le nombre de groupes en série."""
    parallel_per_group: int = PARALLEL_PER_GROUP
    """Le nombre de cellules en parallèle par groupe."""
    pack_voltage_max_mv: int = CELL_VOLTAGE_MAX_MV * CELL_GROUPS
    """La tension maximale du pack."""
    pack_voltage_min_mv: int = CELL_VOLTAGE_MIN_MV * CELL_GROUPS
    """La tension minimale du pack."""
    cell_voltage_max_mv: int = CELL_VOLTAGE_MAX_MV
    """La tension maximale d'une cellule."""
    cell_voltage_min_mv: int = CELL_VOLTAGE_MIN_MV
    """La tension minimale d'une cellule."""

    def __post_init__(self) -> None:
        if self.capacity_mah <= 0:
            raise ValueError("La capacité du pack doit être supérieure à 0.")

        if self.pack_voltage_max_mv <= self.pack_voltage_min_mv:
            raise ValueError("La tension maximale du pack doit être supérieure à la tension minimale.")

    @property
    def cell_capacity_mah(self) -> float:
        """La capacité nominale d'une cellule (groupe agrégé)."""
        return self.capacity_mah / self.parallel_per_group

    @classmethod
    def from_profile(cls, profile: ProfileConfig) -> "PackSpec":
        """
        Construit la description d'un pack à partir d'un profil.

        :param profile: La configuration du profil.
        :type profile: ProfileConfig
        :return: La description du pack.
        :rtype: PackSpec
        """
        return cls(capacity_mah=profile.capacity_mah, energy_wh=profile.energy_wh)


@dataclass(frozen=True)
class Thresholds:
    """
    Seuils de tension par cellule en millivolts.
    """

    c_uvt: int = 1580
    """Le seuil critique de sous-tension."""
    d_uvt: int = 2750
    """Le seuil dangereux de sous-tension."""
    c_ovt: int = 4700
    """Le seuil critique de surtension."""
    d_ovt: int = 4200
    """Le seuil dangereux de surtension."""
    c_lbd: int = 800
    """L'écart critique d'équilibrage."""

    def __post_init__(self) -> None:
        if not self.c_uvt < self.d_uvt < self.d_ovt < self.c_ovt:
            raise ValueError("Les seuils doivent respecter cUVT < dUVT < dOVT < cOVT.")

        if self.c_lbd <= 0:
            raise ValueError("L'écart critique d'équilibrage doit être supérieur à 0.")


@dataclass(frozen=True)
class CellGroup:
    """
    Instantané d'un groupe de cellules.
    """

    index: int
    """Le numéro du groupe (1 à 10)."""
    voltage: float
    """La tension à vide en millivolts."""
    nominal_capacity: float
    """La capacité nominale en mAh."""
    effective_capacity: float
    """La capacité effective en mAh."""
    degradation_factor: float
    """Le multiplicateur de décharge (>= 1)."""
    dead: bool
    """Indique si le groupe est mort (tension bloquée à 0)."""
