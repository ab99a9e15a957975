"""
Ce package contient les configurations nécessaires pour la simulation.
"""

from .simulation_config import (
    Attack,
    BatteryModelConfig,
    BusConfig,
    Countermeasure,
    DES_VARIANTS,
    DurationConfig,
    DrvDataConfig,
    KernelConfig,
    MatrixConfig,
    PlrSettings,
    Profile,
    ProfileConfig,
    ScenarioConfig,
    SimulationConfig,
    TimelineConfig,
    TimingConfig,
    UbrSettings,
    UserBehavior,
    format_countermeasures,
    get_simulation_config,
    parse_countermeasures,
)

__all__ = [
    "Attack",
    "BatteryModelConfig",
    "BusConfig",
    "Countermeasure",
    "DES_VARIANTS",
    "DurationConfig",
    "DrvDataConfig",
    "KernelConfig",
    "MatrixConfig",
    "PlrSettings",
    "Profile",
    "ProfileConfig",
    "ScenarioConfig",
    "SimulationConfig",
    "TimelineConfig",
    "TimingConfig",
    "UbrSettings",
    "UserBehavior",
    "format_countermeasures",
    "get_simulation_config",
    "parse_countermeasures",
]
