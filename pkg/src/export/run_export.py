"""
Module qui contient les fonctions d'exportation des résultats d'une exécution.

Ce module contient l'écriture atomique des fichiers events.jsonl, metrics.csv, voltages.csv,
sniffer.jsonl, outcome.json et frames.txt, ainsi que l'exportation de la matrice attaques x
contre-mesures.
"""

import json
import os
import tempfile
from pathlib import Path
from typing import TYPE_CHECKING, Any, Iterable

import pandas as pd
from loguru import logger

import schema.model_ids as schema_ids
from attacks import ScenarioOutcome
from config import format_countermeasures
from schema import MatrixSchema, MetricsSchema, VoltageTraceSchema, validate_schema

from .path import RunManifest, sanitize_path_name

if TYPE_CHECKING:
    from simulation import ScenarioRun

LOGGER = logger.bind(name="BES-Simulation.Export.Run")

MATRIX_CSV: str = "matrix.csv"
MATRIX_JSONL: str = "matrix.jsonl"


def write_text_atomic(output_path: Path, content: str) -> None:
    """
    Écrit un fichier texte de façon atomique : fichier temporaire dans le même répertoire puis
    remplacement.

    :param output_path: Le chemin du fichier de sortie.
    :type output_path: Path
    :param content: Le contenu.
    :type content: str
    """
    output_path.parent.mkdir(parents=True, exist_ok=True)

    with tempfile.NamedTemporaryFile(
        "w", encoding="utf-8", dir=output_path.parent, prefix=f".{output_path.name}.", delete=False
    ) as temporary:
        temporary.write(content)
        temporary_path = Path(temporary.name)

    try:
        os.replace(temporary_path, output_path)
    except OSError:
        temporary_path.unlink(missing_ok=True)
        raise


def export_dataframe_to_csv(dataframe: pd.DataFrame, output_path: Path) -> None:
    """
    Sauvegarde le DataFrame dans un fichier CSV.

    :param dataframe: Le DataFrame.
    :type dataframe: pd.DataFrame
    :param output_path: Le chemin du fichier de sortie.
    :type output_path: Path
    """
    LOGGER.debug(f"Sauvegarde du DataFrame en fichier CSV : '{output_path}'.")

    write_text_atomic(sanitize_path_name(output_path), dataframe.to_csv(index=False, lineterminator="\n"))


def _optional_int(value: Any) -> Any:
    return pd.NA if value is None else int(value)


def metrics_dataframe(run: "ScenarioRun") -> pd.DataFrame:
    """
    Construit le tableau des métriques d'une exécution (une ligne).

    :param run: L'exécution.
    :type run: ScenarioRun
    :return: Le DataFrame validé par MetricsSchema.
    :rtype: pd.DataFrame
    """
    scenario, outcome, system = run.scenario, run.outcome, run.system
    metrics: dict[str, Any] = outcome.metrics
    counters = system.bus.counters

    row: dict[str, Any] = {
        schema_ids.ATTACK: str(scenario.attack),
        schema_ids.PROFILE: str(scenario.profile),
        schema_ids.COUNTERMEASURES: format_countermeasures(scenario.countermeasures),
        schema_ids.SEED: str(scenario.seed),
        schema_ids.DURATION_MS: scenario.duration,
        schema_ids.TICK_INTERVAL_MS: scenario.tick_interval,
        schema_ids.INITIAL_SOC: scenario.initial_soc,
        schema_ids.OUTCOME: str(outcome.label),
        schema_ids.SUCCESS: outcome.success,
        schema_ids.FAILURE_REASON: outcome.failure_reason or "",
        schema_ids.END_T_MS: system.kernel.now,
        schema_ids.AUTONOMY_LOSS_PCT: float(system.pack.autonomy_loss_pct()),
        schema_ids.DEAD_CELLS: ";".join(str(group) for group in system.pack.check_cell_health()),
        schema_ids.TIME_TO_REVEAL_MS: _optional_int(metrics.get("timeToReveal")),
        schema_ids.CRACK_TIME_MS: metrics.get("crackTimeMs"),
        schema_ids.DRAIN_MAH: system.initial_charge_mah - float(system.pack.total_charge_mah),
        schema_ids.SLEEP_INTERVALS: system.bctrl.sleep_count,
        schema_ids.FRAMES_SENT: counters.frames_sent,
        schema_ids.FRAMES_DROPPED: counters.frames_dropped,
        schema_ids.LEGIT_FRAMES_DROPPED: counters.legit_frames_dropped,
        schema_ids.FRAMES_REJECTED: counters.frames_rejected,
        schema_ids.REBOOTS: system.bts.reboots,
        schema_ids.EVENTS: len(system.event_log.records),
    }

    dataframe = pd.DataFrame([row])
    dataframe[schema_ids.TIME_TO_REVEAL_MS] = dataframe[schema_ids.TIME_TO_REVEAL_MS].astype("Int64")

    return validate_schema(dataframe, MetricsSchema)


def voltages_dataframe(run: "ScenarioRun") -> pd.DataFrame:
    """
    Construit le tableau des traces de tension d'une exécution.

    :param run: L'exécution.
    :type run: ScenarioRun
    :return: Le DataFrame validé par VoltageTraceSchema.
    :rtype: pd.DataFrame
    """
    columns = [schema_ids.T_MS, *schema_ids.VC_COLUMNS, schema_ids.BATTLEVEL, schema_ids.SLEEPING, schema_ids.CHARGING]
    dataframe = pd.DataFrame(run.system.traces, columns=columns)

    return validate_schema(dataframe, VoltageTraceSchema)


def export_run(run: "ScenarioRun", output_path: Path) -> RunManifest:
    """
    Exporte les fichiers d'une exécution dans son répertoire de sortie.

    :param run: L'exécution.
    :type run: ScenarioRun
    :param output_path: Le répertoire racine des sorties.
    :type output_path: Path
    :return: Le manifeste des fichiers produits.
    :rtype: RunManifest
    :raises OSError: Si un fichier ne peut pas être écrit.
    """
    manifest = RunManifest.for_scenario(run.scenario, output_path)
    LOGGER.info(f"Exportation de l'exécution {run.scenario.label} dans '{manifest.directory}'.")

    frames: list[str] = run.system.bus.frame_dump

    write_text_atomic(manifest.events, run.event_log.to_jsonl())
    export_dataframe_to_csv(metrics_dataframe(run), manifest.metrics)
    export_dataframe_to_csv(voltages_dataframe(run), manifest.voltages)
    write_text_atomic(manifest.sniffer, run.system.sniffer.to_jsonl())
    write_text_atomic(manifest.outcome, json.dumps(run.outcome.to_json(), indent=2, sort_keys=True) + "\n")
    write_text_atomic(manifest.frames, "".join(f"{line}\n" for line in frames))

    return manifest


def matrix_dataframe(outcomes: Iterable[ScenarioOutcome]) -> pd.DataFrame:
    """
    Construit le tableau de la matrice attaques x contre-mesures.

    :param outcomes: Les résultats, dans l'ordre d'énumération de la matrice.
    :type outcomes: Iterable[ScenarioOutcome]
    :return: Le DataFrame validé par MatrixSchema.
    :rtype: pd.DataFrame
    """
    rows: list[dict[str, Any]] = [
        {
            schema_ids.ATTACK: str(outcome.attack),
            schema_ids.PROFILE: str(outcome.profile),
            schema_ids.COUNTERMEASURES: format_countermeasures(outcome.countermeasures),
            schema_ids.SEED: str(outcome.seed),
            schema_ids.OUTCOME: str(outcome.label),
            schema_ids.SUCCESS: outcome.success,
            schema_ids.FAILURE_REASON: outcome.failure_reason or "",
        }
        for outcome in outcomes
    ]
    columns = [
        schema_ids.ATTACK,
        schema_ids.PROFILE,
        schema_ids.COUNTERMEASURES,
        schema_ids.SEED,
        schema_ids.OUTCOME,
        schema_ids.SUCCESS,
        schema_ids.FAILURE_REASON,
    ]

    return validate_schema(pd.DataFrame(rows, columns=columns), MatrixSchema)


def export_matrix(outcomes: list[ScenarioOutcome], output_path: Path) -> dict[str, Path]:
    """
    Exporte la matrice attaques x contre-mesures en CSV et en lignes JSON (métriques incluses).

    :param outcomes: Les résultats.
    :type outcomes: list[ScenarioOutcome]
    :param output_path: Le répertoire de sortie.
    :type output_path: Path
    :return: Les fichiers produits.
    :rtype: dict[str, Path]
    :raises OSError: Si un fichier ne peut pas être écrit.
    """
    LOGGER.info(f"Exportation de la matrice ({len(outcomes)} cellules) dans '{output_path}'.")

    csv_path = output_path / MATRIX_CSV
    jsonl_path = output_path / MATRIX_JSONL

    export_dataframe_to_csv(matrix_dataframe(outcomes), csv_path)
    write_text_atomic(
        jsonl_path,
        "".join(json.dumps(outcome.to_json(), sort_keys=True, separators=(",", ":")) + "\n" for outcome in outcomes),
    )

    return {"matrix": csv_path, "matrixJsonl": jsonl_path}
