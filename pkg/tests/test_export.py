"""
Tests de l'export des exécutions et de la matrice.
"""

import json
from pathlib import Path

import pandas as pd
import pytest

import schema.model_ids as schema_ids
from attacks import OutcomeLabel, ScenarioOutcome, install_rejected
from config import Attack, Countermeasure, Profile, ScenarioConfig, SimulationConfig
from export import (
    RunManifest,
    export_matrix,
    export_run,
    get_run_directory_name,
    matrix_dataframe,
    sanitize_path_name,
    write_text_atomic,
)
from simulation import ScenarioRun, run_scenario


@pytest.fixture(scope="module")
def des6_run() -> ScenarioRun:
    return run_scenario(ScenarioConfig(attack=Attack.DES6, seed=7, duration=40_000))


def outcome(attack: Attack, profile: Profile, success: bool) -> ScenarioOutcome:
    return ScenarioOutcome(
        attack=attack,
        profile=profile,
        countermeasures=frozenset() if success else frozenset({Countermeasure.C2}),
        seed=7,
        label=OutcomeLabel.SUCCESS if success else OutcomeLabel.ATTACK_FAILED,
        failure_reason=None if success else install_rejected("SignatureInvalid"),
        metrics={"endMs": 40_000},
    )


def test_sanitize_path_name():
    assert sanitize_path_name(Path("out") / 'plr:c1+c3*"x"').name == "plr_c1_c3__x_"
    assert sanitize_path_name(Path("out/ubr-m365-none-7")) == Path("out/ubr-m365-none-7")


def test_run_directory_name(scenario_factory, tmp_path: Path):
    scenario = scenario_factory(
        attack=Attack.PLR, profile=Profile.ES3, countermeasures=frozenset({Countermeasure.C3, Countermeasure.C1})
    )
    manifest = RunManifest.for_scenario(scenario, tmp_path)

    assert get_run_directory_name(scenario) == "plr-es3-c1+c3-7"
    assert manifest.directory == tmp_path / "plr-es3-c1_c3-7"
    assert manifest.to_json()["config"]["attack"] == "plr"
    assert set(manifest.to_json()["outputs"]) == {"events", "metrics", "voltages", "sniffer", "outcome", "frames"}


def test_atomic_write_leaves_no_temporary_file(tmp_path: Path):
    target = tmp_path / "nested" / "outcome.json"

    write_text_atomic(target, "first")
    write_text_atomic(target, "second")

    assert target.read_text(encoding="utf-8") == "second"
    assert [path.name for path in target.parent.iterdir()] == ["outcome.json"]


def test_export_run_writes_every_file(des6_run: ScenarioRun, tmp_path: Path):
    manifest = export_run(des6_run, tmp_path)

    assert manifest.directory == tmp_path / "des6-m365-none-7"
    assert all(path.exists() for path in manifest.outputs.values())

    events = manifest.events.read_text(encoding="utf-8").splitlines()
    assert len(events) == len(des6_run.event_log.records)
    assert json.loads(events[0])["t"] == 0

    assert json.loads(manifest.outcome.read_text(encoding="utf-8")) == des6_run.outcome.to_json()
    assert manifest.frames.read_text(encoding="utf-8").splitlines() == des6_run.system.bus.frame_dump
    assert manifest.sniffer.read_text(encoding="utf-8") == des6_run.system.sniffer.to_jsonl()


def test_exported_tables(des6_run: ScenarioRun, tmp_path: Path, simulation_config: SimulationConfig):
    manifest = export_run(des6_run, tmp_path)

    metrics = pd.read_csv(manifest.metrics)
    voltages = pd.read_csv(manifest.voltages)

    assert len(metrics) == 1
    assert metrics.loc[0, schema_ids.ATTACK] == "des6"
    assert metrics.loc[0, schema_ids.OUTCOME] == "success"
    assert metrics.loc[0, schema_ids.END_T_MS] == des6_run.system.kernel.now
    assert metrics.loc[0, schema_ids.EVENTS] == len(des6_run.event_log.records)

    assert list(voltages.columns) == [
        schema_ids.T_MS,
        *schema_ids.VC_COLUMNS,
        schema_ids.BATTLEVEL,
        schema_ids.SLEEPING,
        schema_ids.CHARGING,
    ]
    assert len(voltages) == len(des6_run.system.traces)
    assert voltages[schema_ids.T_MS].diff().dropna().eq(simulation_config.kernel.trace_interval_ms).all()


def test_export_matrix(tmp_path: Path):
    outcomes = [outcome(Attack.UBR, Profile.M365, True), outcome(Attack.PLR, Profile.ES3, False)]

    outputs = export_matrix(outcomes, tmp_path / "matrix")
    table = pd.read_csv(outputs["matrix"], keep_default_na=False)
    lines = outputs["matrixJsonl"].read_text(encoding="utf-8").splitlines()

    assert table[schema_ids.COUNTERMEASURES].tolist() == ["none", "c2"]
    assert table[schema_ids.FAILURE_REASON].tolist() == ["", "InstallRejected:SignatureInvalid"]
    assert table[schema_ids.SUCCESS].tolist() == [True, False]
    assert [json.loads(line) for line in lines] == [item.to_json() for item in outcomes]


def test_matrix_dataframe_keeps_the_enumeration_order():
    outcomes = [outcome(attack, Profile.M365, True) for attack in (Attack.PLR, Attack.UBR, Attack.DES3)]

    assert matrix_dataframe(outcomes)[schema_ids.ATTACK].tolist() == ["plr", "ubr", "des3"]
