"""
Ce package contient les fonctions d'export des résultats des exécutions et de la matrice.
"""

from .path import RunManifest, get_run_directory_name, sanitize_path_name
from .run_export import (
    export_dataframe_to_csv,
    export_matrix,
    export_run,
    matrix_dataframe,
    metrics_dataframe,
    voltages_dataframe,
    write_text_atomic,
)


__all__ = [
    "RunManifest",
    "export_dataframe_to_csv",
    "export_matrix",
    "export_run",
    "get_run_directory_name",
    "matrix_dataframe",
    "metrics_dataframe",
    "sanitize_path_name",
    "voltages_dataframe",
    "write_text_atomic",
]
