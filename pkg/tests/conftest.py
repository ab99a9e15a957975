"""
Fixtures partagées des tests.
"""

from typing import Any, Callable

import numpy as np
import pytest

from config import ScenarioConfig, SimulationConfig, UserBehavior, get_simulation_config
from fwpipe import KeyMaterial, generate_key_material
from simkern import EventLog, RandomStreams, SimKernel
from simulation import CONFIG_FILE, ScooterSystem


@pytest.fixture(scope="session")
def simulation_config() -> SimulationConfig:
    """La configuration du fichier par défaut."""
    return get_simulation_config(CONFIG_FILE)


@pytest.fixture(scope="session")
def key_material() -> KeyMaterial:
    """Les clés du fabricant pour la graine 7."""
    return generate_key_material(RandomStreams(7))


@pytest.fixture
def kernel() -> SimKernel:
    return SimKernel()


@pytest.fixture
def event_log(kernel: SimKernel) -> EventLog:
    return EventLog(kernel.clock)


@pytest.fixture
def rng() -> np.random.Generator:
    """Générateur des suites de propriétés, fixé pour que les échecs soient reproductibles."""
    return np.random.default_rng(20240607)


@pytest.fixture
def scenario_factory() -> Callable[..., ScenarioConfig]:
    """Fabrique de descripteurs avec une graine fixe."""

    def _make(**fields: Any) -> ScenarioConfig:
        return ScenarioConfig(**{"seed": 7, **fields})

    return _make


@pytest.fixture
def system(scenario_factory: Callable[..., ScenarioConfig], simulation_config: SimulationConfig) -> ScooterSystem:
    """Une trottinette M365 d'origine, utilisateur stationné, non démarrée."""
    return ScooterSystem(scenario_factory(user_behavior=UserBehavior.PARKED), simulation_config)
