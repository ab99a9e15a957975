"""
Module de chargement de la configuration.

Ce module permet de charger les données de configuration à partir d'un fichier TOML.
"""

from functools import lru_cache
from pathlib import Path
from typing import Optional

from loguru import logger
import toml


LOGGER = logger.bind(name="BES-Simulation.Config.LoadConfig")


@lru_cache
def load_config(config_file: Optional[Path]) -> dict:
    """
    Retourne les données de configuration du fichier TOML.

    :param config_file: Le chemin du fichier de configuration. Aucun fichier retourne une configuration vide.
    :type config_file: Optional[Path]
    :return: Les données de configuration.
    :rtype: dict
    """
    if config_file is None:
        LOGGER.debug("Aucun fichier de configuration, utilisation des valeurs par défaut.")
        return {}

    LOGGER.debug(f"Chargement du fichier de configuration : '{config_file}'.")

    with open(config_file, "r", encoding="utf-8") as file:
        data = toml.load(file)

    return data
