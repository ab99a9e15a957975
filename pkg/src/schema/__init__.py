"""
Ce package contient les schémas des données exportées.
"""

from .model import (
    MatrixSchema,
    MetricsSchema,
    VoltageTraceSchema,
    validate_schema,
)


__all__ = [
    "MatrixSchema",
    "MetricsSchema",
    "VoltageTraceSchema",
    "validate_schema",
]
