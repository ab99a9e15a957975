"""
Module du pistage par les composants internes (UTI).

Ce module contient la construction du message Track à partir des données lues sur le DRV et son
décodage côté attaquant à partir des annonces observées par le renifleur.
"""

from typing import Iterable, Optional

import pandas as pd
from loguru import logger

from periph import AdvertRecord

from .attack_models import FINGERPRINT_SIZE, TRACK_RESERVED_SIZE, TRACK_SIZE, TrackMessage

LOGGER = logger.bind(name="BES-Simulation.Attacks.Track")

TRACK_COLUMNS: list[str] = ["t", "fingerprint", "mileage", "batt_level"]


def fingerprint_of(drv_id: bytes) -> bytes:
    """
    Retourne l'empreinte d'une trottinette : les 8 derniers octets du numéro de série DRV.

    :param drv_id: Le numéro de série.
    :type drv_id: bytes
    :return: L'empreinte.
    :rtype: bytes
    :raises ValueError: Si le numéro de série est trop court.
    """
    if len(drv_id) < FINGERPRINT_SIZE:
        raise ValueError(f"Un numéro de série de {len(drv_id)} octets ne contient pas d'empreinte.")

    return bytes(drv_id[-FINGERPRINT_SIZE:])


def build_track(drv_id: bytes, mileage: int, batt_level: int) -> TrackMessage:
    return TrackMessage(fingerprint=fingerprint_of(drv_id), mileage=mileage, batt_level=batt_level)


def is_track_name(name: bytes) -> bool:
    return len(name) == TRACK_SIZE and name[-TRACK_RESERVED_SIZE:] == bytes(TRACK_RESERVED_SIZE)


def decode_tracks(adverts: Iterable[AdvertRecord], fingerprint: Optional[bytes] = None) -> list[tuple[int, TrackMessage]]:
    """
    Décode les annonces qui ont la forme d'un message Track.

    :param adverts: Les annonces observées.
    :type adverts: Iterable[AdvertRecord]
    :param fingerprint: L'empreinte recherchée, None pour toutes.
    :type fingerprint: Optional[bytes]
    :return: Les messages horodatés, dans l'ordre d'observation.
    :rtype: list[tuple[int, TrackMessage]]
    """
    tracks = [
        (advert.t, TrackMessage.from_bytes(advert.name)) for advert in adverts if is_track_name(advert.name)
    ]

    if fingerprint is not None:
        tracks = [(t, track) for t, track in tracks if track.fingerprint == fingerprint]

    LOGGER.debug(f"{len(tracks)} message(s) Track décodé(s).")

    return tracks


def tracks_dataframe(tracks: list[tuple[int, TrackMessage]]) -> pd.DataFrame:
    """
    Retourne les messages Track décodés sous forme de tableau.

    :param tracks: Les messages horodatés.
    :type tracks: list[tuple[int, TrackMessage]]
    :return: Le tableau (t, fingerprint, mileage, batt_level).
    :rtype: pd.DataFrame
    """
    return pd.DataFrame(
        [(t, track.fingerprint.hex(), track.mileage, track.batt_level) for t, track in tracks],
        columns=TRACK_COLUMNS,
    )
