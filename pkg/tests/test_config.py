"""
Tests de la configuration : fichier TOML par défaut, surcharges partielles et validation des
descripteurs.
"""

from pathlib import Path

import pytest
from pydantic import ValidationError

from config import (
    Attack,
    Countermeasure,
    DrvDataConfig,
    Profile,
    ProfileConfig,
    ScenarioConfig,
    SimulationConfig,
    UbrSettings,
    format_countermeasures,
    get_simulation_config,
    parse_countermeasures,
)


def write_config(tmp_path: Path, content: str) -> Path:
    path = tmp_path / "CONFIG_test.toml"
    path.write_text(content, encoding="utf-8")

    return path


def test_default_file_matches_the_built_in_defaults(simulation_config: SimulationConfig):
    assert simulation_config == SimulationConfig()


def test_default_file_values(simulation_config: SimulationConfig):
    assert simulation_config.timing.bms_timeout_ms == 3000
    assert simulation_config.timing.error_power_off_ms == 10_000
    assert simulation_config.bus.window_capacity == 20
    assert simulation_config.durations.for_attack(Attack.DES4) == 40_000
    assert simulation_config.durations.for_attack(Attack.UBR) == 12_600_000
    assert simulation_config.durations.tick_for_attack(Attack.UBR) == 1000
    assert simulation_config.durations.tick_for_attack(Attack.DES4) == 100
    assert simulation_config.profile(Profile.ES3).drv_check_active
    assert simulation_config.profile(Profile.M365).fast_discharge_ma == 2600


def test_missing_file_uses_the_defaults():
    assert get_simulation_config(None) == SimulationConfig()


def test_partial_sections_override_only_their_keys(tmp_path: Path):
    path = write_config(
        tmp_path,
        """
[SIMULATION.timing]
bms_timeout_ms = 5000

[SCENARIO.matrix]
seed = 42

[PROFILES.es3]
drv_version = "0.1.12"
""",
    )

    config = get_simulation_config(path)

    assert config.timing.bms_timeout_ms == 5000
    assert config.timing.auto_off_ms == 15_000
    assert config.matrix.seed == 42
    assert config.profile(Profile.ES3).drv_version == "0.1.12"
    assert config.profile(Profile.ES3).capacity_mah == 7650
    assert config.profile(Profile.M365) == SimulationConfig().profile(Profile.M365)


def test_invalid_values_in_the_file_are_refused(tmp_path: Path):
    path = write_config(tmp_path, "[SIMULATION.timing]\nauto_off_ms = 0\n")

    with pytest.raises(ValidationError):
        get_simulation_config(path)


@pytest.mark.parametrize(
    "fields",
    [
        {"duration": 0},
        {"tick_interval": -100},
        {"seed": -1},
        {"seed": 2**64},
        {"initial_soc": 101.0},
        {"attack": "des8"},
        {"profile": "g30"},
    ],
    ids=["duration", "tick", "negative-seed", "seed-overflow", "soc", "attack", "profile"],
)
def test_scenario_validation(fields):
    with pytest.raises(ValidationError):
        ScenarioConfig(**fields)


def test_scenario_is_frozen_and_labelled():
    scenario = ScenarioConfig(
        attack=Attack.PLR, countermeasures=frozenset({Countermeasure.C3, Countermeasure.C1}), seed=2**64 - 1
    )

    assert scenario.label == f"plr/m365/c1+c3/seed={2**64 - 1}"
    assert scenario.has(Countermeasure.C1)
    assert not scenario.has(Countermeasure.C4)

    with pytest.raises(ValidationError):
        scenario.seed = 1


def test_countermeasure_lists():
    assert parse_countermeasures("c1, C3") == frozenset({Countermeasure.C1, Countermeasure.C3})
    assert parse_countermeasures("c2+c4") == frozenset({Countermeasure.C2, Countermeasure.C4})
    assert parse_countermeasures("none") == frozenset()
    assert parse_countermeasures(None) == frozenset()
    assert format_countermeasures(frozenset()) == "none"
    assert format_countermeasures(frozenset(Countermeasure)) == "c1+c2+c3+c4"

    with pytest.raises(ValueError):
        parse_countermeasures("c5")


def test_section_validators():
    with pytest.raises(ValidationError):
        UbrSettings(ransom_url="https://t.ly/AaBbCc")

    with pytest.raises(ValidationError):
        DrvDataConfig(password="12345a")

    with pytest.raises(ValidationError):
        DrvDataConfig(mileage_km=70_000)

    with pytest.raises(ValidationError):
        ProfileConfig(**{**SimulationConfig().profile(Profile.M365).model_dump(), "model_code": "161/"})


def test_des_variants():
    assert [attack for attack in Attack if attack.is_des] == [Attack(f"des{index}") for index in range(1, 8)]
    assert not Attack.UBR.is_des
