"""
Module pour la gestion des chemins des fichiers de sortie d'une exécution.

Ce module contient le manifeste d'une exécution (descripteur et chemins des fichiers produits) et la
correction des noms de fichiers.
"""

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from loguru import logger

from config import ScenarioConfig, format_countermeasures

LOGGER = logger.bind(name="BES-Simulation.Export.Path")

EVENTS_FILE: str = "events.jsonl"
METRICS_FILE: str = "metrics.csv"
VOLTAGES_FILE: str = "voltages.csv"
SNIFFER_FILE: str = "sniffer.jsonl"
OUTCOME_FILE: str = "outcome.json"
FRAMES_FILE: str = "frames.txt"


def sanitize_path_name(path: Path) -> Path:
    """
    Fonction qui remplace les caractères invalides dans le nom d'un fichier.

    :param path: Le chemin du fichier.
    :type path: Path
    :return: Le chemin du fichier avec un nom sans caractères invalides.
    :rtype: Path
    """
    LOGGER.debug(f"Validation du nom du fichier : '{path.name}'.")

    invalid_chars = r'[<>:"/\\|?*+=]'
    sanitized_name = re.sub(invalid_chars, "_", path.name)

    return path.with_name(sanitized_name)


def get_run_directory_name(scenario: ScenarioConfig) -> str:
    """
    Récupère le nom du répertoire d'une exécution.

    :param scenario: Le descripteur.
    :type scenario: ScenarioConfig
    :return: Le nom (ex. 'ubr-m365-none-7').
    :rtype: str
    """
    return f"{scenario.attack}-{scenario.profile}-{format_countermeasures(scenario.countermeasures)}-{scenario.seed}"


@dataclass(frozen=True)
class RunManifest:
    """
    Manifeste d'une exécution : descripteur et fichiers produits.
    """

    config: ScenarioConfig
    """Le descripteur exécuté."""
    directory: Path
    """Le répertoire de sortie."""

    @classmethod
    def for_scenario(cls, scenario: ScenarioConfig, output_path: Path) -> "RunManifest":
        """
        Construit le manifeste d'une exécution dans un sous-répertoire nommé d'après le descripteur.

        :param scenario: Le descripteur.
        :type scenario: ScenarioConfig
        :param output_path: Le répertoire racine des sorties.
        :type output_path: Path
        :return: Le manifeste.
        :rtype: RunManifest
        """
        return cls(config=scenario, directory=sanitize_path_name(output_path / get_run_directory_name(scenario)))

    @property
    def events(self) -> Path:
        return self.directory / EVENTS_FILE

    @property
    def metrics(self) -> Path:
        return self.directory / METRICS_FILE

    @property
    def voltages(self) -> Path:
        return self.directory / VOLTAGES_FILE

    @property
    def sniffer(self) -> Path:
        return self.directory / SNIFFER_FILE

    @property
    def outcome(self) -> Path:
        return self.directory / OUTCOME_FILE

    @property
    def frames(self) -> Path:
        return self.directory / FRAMES_FILE

    @property
    def outputs(self) -> dict[str, Path]:
        """Les fichiers produits, par nom."""
        return {
            "events": self.events,
            "metrics": self.metrics,
            "voltages": self.voltages,
            "sniffer": self.sniffer,
            "outcome": self.outcome,
            "frames": self.frames,
        }

    def to_json(self) -> dict[str, Any]:
        """
        Retourne le manifeste sérialisable.

        :return: Le descripteur et les chemins.
        :rtype: dict[str, Any]
        """
        return {
            "config": self.config.model_dump(mode="json"),
            "outputs": {name: str(path) for name, path in self.outputs.items()},
        }
