"""
Ce package contient les fonctions permettant de configurer les logs de l'application.
"""

from .loguru_config import configure_logger, get_username

__all__ = ["configure_logger", "get_username"]
