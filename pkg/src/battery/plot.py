"""
Module qui contient les fonctions pour afficher les traces de tension.

Ce module contient les fonctions pour afficher un graphique des tensions des groupes de cellules et du
niveau de batterie à partir d'un fichier voltages.csv.
"""

from pathlib import Path
from typing import Optional

import pandas as pd
import plotly.graph_objects as go
from loguru import logger
from plotly.subplots import make_subplots

import schema.model_ids as schema_ids
from schema import VoltageTraceSchema, validate_schema
from .pack_models import Thresholds

LOGGER = logger.bind(name="BES-Simulation.Battery.Plot")

MS_PER_HOUR: float = 3_600_000.0


def create_voltage_traces(dataframe: pd.DataFrame) -> list[go.Scatter]:
    """
    Crée une trace par groupe de cellules.

    :param dataframe: La trace de tension.
    :type dataframe: pd.DataFrame
    :return: La liste des traces Scatter.
    :rtype: list[go.Scatter]
    """
    hours = dataframe[schema_ids.T_MS] / MS_PER_HOUR

    return [
        go.Scatter(
            x=hours,
            y=dataframe[column],
            mode="lines",
            name=column.upper(),
            showlegend=True,
        )
        for column in schema_ids.VC_COLUMNS
    ]


def add_threshold_lines(fig: go.Figure, thresholds: Thresholds) -> None:
    """
    Ajoute les lignes horizontales des seuils de sous-tension.

    :param fig: La figure Plotly.
    :type fig: go.Figure
    :param thresholds: Les seuils.
    :type thresholds: Thresholds
    """
    for label, value, color in (("dUVT", thresholds.d_uvt, "orange"), ("cUVT", thresholds.c_uvt, "red")):
        fig.add_hline(
            y=value,
            line=dict(dash="dash", color=color),
            annotation_text=f"{label} ({value} mV)",
            annotation_position="top left",
            row=1,
            col=1,
        )


def update_layout(fig: go.Figure, title: str, template: str) -> None:
    """
    Met à jour la mise en page de la figure.

    :param fig: La figure Plotly.
    :type fig: go.Figure
    :param title: Le titre du graphique.
    :type title: str
    :param template: Le template du graphique.
    :type template: str
    """
    fig.update_layout(
        title=dict(text=title, font=dict(size=24, weight="bold")),
        template=template,
        legend=dict(title=dict(text="Cell groups", font=dict(weight="bold", size=16)), x=1.01, y=1.0),
    )
    fig.update_yaxes(title_text="Voltage (mV)", row=1, col=1)
    fig.update_yaxes(title_text="Battery level (%)", range=[0, 100], row=2, col=1)
    fig.update_xaxes(title_text="Virtual time (h)", row=2, col=1)


def plot_voltage_trace(
    dataframe: pd.DataFrame,
    title: str = "Cell group voltages",
    thresholds: Optional[Thresholds] = None,
    template: str = "plotly",
    output_path: Optional[Path] = None,
    show_plot: bool = False,
) -> go.Figure:
    """
    Fonction qui affiche un graphique des tensions des groupes et du niveau de batterie.

    :param dataframe: La trace de tension (schéma VoltageTraceSchema).
    :type dataframe: pd.DataFrame
    :param title: Le titre du graphique.
    :type title: str
    :param thresholds: Les seuils affichés.
    :type thresholds: Optional[Thresholds]
    :param template: Le template du graphique.
    :type template: str
    :param output_path: Le chemin du fichier HTML de sortie.
    :type output_path: Optional[Path]
    :param show_plot: Afficher le graphique.
    :type show_plot: bool
    :return: La figure.
    :rtype: go.Figure
    :raises ValueError: Si la trace est vide.
    """
    if dataframe.empty:
        raise ValueError("La trace de tension est vide.")

    dataframe = validate_schema(dataframe, VoltageTraceSchema)
    LOGGER.debug(f"Génération du graphique des tensions : {len(dataframe)} échantillons.")

    fig = make_subplots(rows=2, cols=1, shared_xaxes=True, row_heights=[0.7, 0.3], vertical_spacing=0.05)

    for trace in create_voltage_traces(dataframe):
        fig.add_trace(trace, row=1, col=1)

    fig.add_trace(
        go.Scatter(
            x=dataframe[schema_ids.T_MS] / MS_PER_HOUR,
            y=dataframe[schema_ids.BATTLEVEL],
            mode="lines",
            name="Battery level",
            line=dict(color="black"),
        ),
        row=2,
        col=1,
    )

    add_threshold_lines(fig, thresholds or Thresholds())
    update_layout(fig, title, template)

    if show_plot:
        fig.show()

    if output_path:
        fig.write_html(output_path)
        LOGGER.info(f"Graphique enregistré : '{output_path}'.")

    return fig


def plot_voltage_file(csv_path: Path, output_path: Path, title: Optional[str] = None) -> go.Figure:
    """
    Lit un fichier voltages.csv et enregistre son graphique en HTML.

    :param csv_path: Le fichier voltages.csv.
    :type csv_path: Path
    :param output_path: Le fichier HTML.
    :type output_path: Path
    :param title: Le titre; par défaut le nom du dossier du fichier.
    :type title: Optional[str]
    :return: La figure.
    :rtype: go.Figure
    """
    dataframe = pd.read_csv(csv_path)

    return plot_voltage_trace(dataframe, title=title or csv_path.parent.name, output_path=output_path)
