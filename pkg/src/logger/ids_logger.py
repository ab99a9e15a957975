"""
Ce module contient les constantes de configuration du logger.
"""

LOG_FORMAT: str = (
    "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: ^8} | {process}:{extra[name]}:{module}:{function}:{line}"
    ":{extra[hostname]}:{extra[username]} - {message}"
)
"""Constante de format des fichiers de log."""

ROOT_LOGGER_NAME: str = "BES-Simulation"
"""Nom racine des loggers de l'application."""

NAME_WIDTH: int = 48
"""Largeur de la colonne du nom du logger dans la sortie standard."""
