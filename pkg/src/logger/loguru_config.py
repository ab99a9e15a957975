"""
Module de configuration du logger loguru.

Ce module contient la fonction de configuration du logger loguru utilisée par la ligne de commande
et par les exécutions parallèles de la matrice de scénarios.
"""

import os
import sys
import zlib
from pathlib import Path
from socket import gethostname
from typing import Optional, Iterable

from loguru import logger

from .ids_logger import LOG_FORMAT, ROOT_LOGGER_NAME, NAME_WIDTH

COLORS: tuple[str, ...] = (
    "blue",
    "light-blue",
    "cyan",
    "light-cyan",
    "green",
    "light-green",
    "magenta",
    "light-magenta",
    "yellow",
    "light-yellow",
)


def name_color(name: str) -> str:
    """
    Retourne une couleur stable pour un nom de logger.

    :param name: Le nom du logger.
    :type name: str
    :return: La couleur loguru.
    :rtype: str
    """
    return COLORS[zlib.crc32(name.encode()) % len(COLORS)]


def formatter(record) -> str:
    color_tag = name_color(record["extra"].get("name", ROOT_LOGGER_NAME))

    return (
        "<bold><white>"
        f"<{color_tag}>"
        f"{{extra[name]: <{NAME_WIDTH}}}"
        f"</{color_tag}> | "
        "<fg #ABA2A2>{time:HH:mm:ss.SSS}</fg #ABA2A2> | </white></bold> "
        "<level>{level: ^8}</level> <bold><white>-</white></bold> <level>{message}</level>\n"
        "<level>{exception}</level>"
    )


def get_username() -> str:
    """
    Fonction pour obtenir le nom d'utilisateur.

    :return: Nom d'utilisateur.
    :rtype: str
    """
    try:
        username = os.getlogin()

    except OSError:
        username = os.getenv("USER", "unknown")

    return username


def configure_logger(
    log_file: Optional[Path] = None,
    std_level: str = "INFO",
    log_file_level: str = "DEBUG",
    rotation: str | int = "50 MB",
    retention: str | int = 5,
    enqueue: bool = False,
    extra_logger: Optional[Iterable[dict]] = None,
) -> None:
    """
    Fonction de configuration du logger loguru.

    La sortie standard reçoit un format coloré par nom de logger; le fichier de log, s'il est fourni,
    reçoit le format complet ``LOG_FORMAT``.

    :param log_file: Chemin du fichier de log.
    :type log_file: Optional[Path]
    :param std_level: Niveau de log pour la sortie standard.
    :type std_level: str
    :param log_file_level: Niveau de log pour le fichier de log.
    :type log_file_level: str
    :param rotation: Taille ou durée de rotation des fichiers de log.
    :type rotation: str | int
    :param retention: Nombre ou durée de rétention des fichiers de log.
    :type retention: str | int
    :param enqueue: Indique si les messages doivent être enfilés (processus multiples).
    :type enqueue: bool
    :param extra_logger: Liste de dictionnaires pour des handlers supplémentaires.
    :type extra_logger: Optional[Iterable[dict]]
    """
    logger.remove()

    handlers = [
        dict(
            sink=sys.stderr,
            backtrace=False,
            diagnose=False,
            format=formatter,
            level=std_level,
            enqueue=enqueue,
        ),
    ]

    if log_file:
        handlers.append(
            dict(
                sink=log_file,
                backtrace=True,
                diagnose=False,
                format=LOG_FORMAT,
                level=log_file_level,
                rotation=rotation,
                retention=retention,
                enqueue=enqueue,
            )
        )

    if extra_logger:
        handlers.extend(extra_logger)

    logger.configure(
        handlers=handlers,
        extra={
            "name": ROOT_LOGGER_NAME,
            "hostname": gethostname(),
            "username": get_username(),
        },
    )
