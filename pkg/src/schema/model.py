"""
Module qui contient les schémas des dataframes.

Ce module contient les schémas des traces de tension, des métriques d'un scénario et de la matrice
attaques x contre-mesures.
"""

from typing import Type

import pandas as pd
import pandera.pandas as pa
from loguru import logger
from pandas import DataFrame
from pandera.typing import Series

LOGGER = logger.bind(name="BES-Simulation.Schema")

VOLTAGE_CHECK = dict(ge=0.0, le=5000.0)


class VoltageTraceSchema(pa.DataFrameModel):
    """
    Schéma des traces de tension (voltages.csv).
    """

    t_ms: Series[int] = pa.Field(ge=0)
    vc1: Series[float] = pa.Field(**VOLTAGE_CHECK)
    vc2: Series[float] = pa.Field(**VOLTAGE_CHECK)
    vc3: Series[float] = pa.Field(**VOLTAGE_CHECK)
    vc4: Series[float] = pa.Field(**VOLTAGE_CHECK)
    vc5: Series[float] = pa.Field(**VOLTAGE_CHECK)
    vc6: Series[float] = pa.Field(**VOLTAGE_CHECK)
    vc7: Series[float] = pa.Field(**VOLTAGE_CHECK)
    vc8: Series[float] = pa.Field(**VOLTAGE_CHECK)
    vc9: Series[float] = pa.Field(**VOLTAGE_CHECK)
    vc10: Series[float] = pa.Field(**VOLTAGE_CHECK)
    battlevel: Series[float] = pa.Field(ge=0.0, le=100.0)
    sleeping: Series[bool]
    charging: Series[bool]

    class Config:
        coerce = True
        strict = True


class MatrixSchema(pa.DataFrameModel):
    """
    Schéma d'une ligne de la matrice attaques x contre-mesures.
    """

    attack: Series[str]
    profile: Series[str]
    countermeasures: Series[str]
    outcome: Series[str] = pa.Field(isin=["success", "success-with-E24", "attack-failed", "baseline"])
    success: Series[bool]
    failure_reason: Series[str]

    class Config:
        coerce = True


class MetricsSchema(MatrixSchema):
    """
    Schéma des métriques d'un scénario (metrics.csv).
    """

    seed: Series[str]
    duration_ms: Series[int] = pa.Field(gt=0)
    tick_interval_ms: Series[int] = pa.Field(gt=0)
    initial_soc: Series[float] = pa.Field(ge=0.0, le=100.0)
    end_t_ms: Series[int] = pa.Field(ge=0)
    autonomy_loss_pct: Series[float] = pa.Field(ge=0.0, le=100.0)
    dead_cells: Series[str]
    time_to_reveal_ms: Series[pd.Int64Dtype()] = pa.Field(nullable=True)
    crack_time_ms: Series[float] = pa.Field(nullable=True)
    drain_mah: Series[float]
    sleep_intervals: Series[int] = pa.Field(ge=0)
    frames_sent: Series[int] = pa.Field(ge=0)
    frames_dropped: Series[int] = pa.Field(ge=0)
    legit_frames_dropped: Series[int] = pa.Field(ge=0)
    frames_rejected: Series[int] = pa.Field(ge=0)
    reboots: Series[int] = pa.Field(ge=0)
    events: Series[int] = pa.Field(ge=0)

    class Config:
        coerce = True


def validate_schema(data: DataFrame, schema: Type[pa.DataFrameModel]) -> DataFrame:
    """
    Valide un dataframe selon un schéma.

    :param data: Les données.
    :type data: DataFrame
    :param schema: Le schéma.
    :type schema: Type[pa.DataFrameModel]
    :return: Les données validées (types convertis).
    :rtype: DataFrame
    :raises pa.errors.SchemaError: Si les données ne respectent pas le schéma.
    """
    try:
        LOGGER.debug(f"Validation du schéma {schema.__name__}.")
        return schema.validate(data)

    except pa.errors.SchemaError as error:
        LOGGER.error(f"Erreur de validation du schéma {schema.__name__} : {error}.")
        LOGGER.error(f"Attributs attendus dans le schéma {schema.__name__} : {schema.__annotations__}")

        raise error

