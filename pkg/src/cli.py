"""
Ce module contient la fonction principale de la ligne de commande.

Il permet d'exécuter un scénario, la matrice attaques x contre-mesures, de produire et flasher des
images, de calibrer le modèle de batterie et de tracer les tensions.
"""

import json
import sys
from pathlib import Path
from typing import Any, Callable, Optional

import click
from loguru import logger
from pydantic import ValidationError

from attacks import StockFirmwareEncryptedError, craft_attack_image
from attacks.unlock_authority import UNLOCK_CODE_SIZE
from battery.calibration import calibrate as calibrate_battery
from battery.plot import plot_voltage_file
from config import (
    Attack,
    Profile,
    ScenarioConfig,
    SimulationConfig,
    format_countermeasures,
    get_simulation_config,
    parse_countermeasures,
)
from export import export_matrix, export_run
from fwpipe import FirmwareImage, ImageFormatError, read_image, write_image
from logger.loguru_config import configure_logger
from simulation import CONFIG_FILE, ScooterSystem, flash_image, run_matrix, run_scenario

LOGGER = logger.bind(name="BES-Simulation.CLI")

EXIT_IO_ERROR: int = 3
IMAGE_KINDS: tuple[str, ...] = ("stock", "recovery", "drv", *(str(attack) for attack in Attack if attack != Attack.NONE))


def setup_logger(log_level: str, log_file: Optional[Path]) -> None:
    """
    Configure le logger et trace la commande exécutée.

    :param log_level: Le niveau de la sortie standard.
    :type log_level: str
    :param log_file: Le fichier de log.
    :type log_file: Optional[Path]
    """
    configure_logger(log_file=log_file, std_level=log_level.upper())
    LOGGER.info(f"Ligne de commande exécutée : python {' '.join(sys.argv)}")


def load_simulation_config(config: Optional[Path]) -> SimulationConfig:
    """
    Charge la configuration, celle par défaut si aucun fichier n'est fourni.

    :param config: Le chemin du fichier de configuration.
    :type config: Optional[Path]
    :return: La configuration.
    :rtype: SimulationConfig
    :raises click.UsageError: Si la configuration est invalide.
    """
    if not config:
        LOGGER.debug("Aucun fichier de configuration fourni. Le fichier de configuration par défaut sera utilisé.")
        config = CONFIG_FILE

    try:
        return get_simulation_config(Path(config))
    except ValidationError as error:
        raise click.UsageError(
            f"Configuration invalide : {error}\nInvalid configuration: {config}"
        ) from error


def build_scenario(**fields: Any) -> ScenarioConfig:
    """
    Construit le descripteur du scénario à partir des options.

    :return: Le descripteur.
    :rtype: ScenarioConfig
    :raises click.UsageError: Si une option est invalide.
    """
    try:
        fields["countermeasures"] = parse_countermeasures(fields.get("countermeasures"))
        return ScenarioConfig(**{key: value for key, value in fields.items() if value is not None})
    except (ValidationError, ValueError) as error:
        raise click.UsageError(f"Options invalides : {error}\nInvalid options.") from error


def write_outputs(action: Callable[[], Any]) -> Any:
    """
    Exécute une écriture de fichiers et termine avec le code 3 en cas d'erreur d'entrée/sortie.

    :param action: L'écriture.
    :type action: Callable[[], Any]
    :return: Le résultat de l'écriture.
    :rtype: Any
    """
    try:
        return action()
    except OSError as error:
        LOGGER.error(f"Erreur d'écriture : {error}.")
        click.echo(f"Erreur d'écriture / write error: {error}", err=True)
        sys.exit(EXIT_IO_ERROR)


def common_options(function: Callable) -> Callable:
    """Options de journalisation et de configuration partagées par les commandes."""
    function = click.option(
        "--log-file",
        type=click.Path(path_type=Path),
        required=False,
        help="""
        Fichier de log (rotation automatique).\n
        Log file (automatic rotation).
        """,
    )(function)
    function = click.option(
        "--log-level",
        type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
        default="INFO",
        show_default=True,
        help="""
        Niveau de log de la sortie standard.\n
        Log level of the standard output.
        """,
    )(function)
    function = click.option(
        "--config",
        type=click.Path(exists=True, path_type=Path),
        required=False,
        help="""
        Chemin du fichier de configuration. Si aucun fichier n'est fourni, le fichier par défaut sera utilisé.\n
        Path of the configuration file. If no file is provided, the default file will be used.
        """,
    )(function)

    return function


def scooter_options(function: Callable) -> Callable:
    """Options du modèle simulé : profil, contre-mesures et graine."""
    function = click.option(
        "--seed",
        type=click.IntRange(min=0),
        default=0,
        show_default=True,
        help="""
        Graine du générateur pseudo-aléatoire.\n
        Seed of the pseudo-random generator.
        """,
    )(function)
    function = click.option(
        "--countermeasures",
        type=str,
        default="none",
        show_default=True,
        help="""
        Contre-mesures actives, séparées par des virgules (ex. c1,c2,c3,c4).\n
        Active countermeasures, comma separated (e.g. c1,c2,c3,c4).
        """,
    )(function)
    function = click.option(
        "--profile",
        type=click.Choice([profile.value for profile in Profile], case_sensitive=False),
        default=Profile.M365.value,
        show_default=True,
        help="""
        Profil du modèle de trottinette.\n
        Scooter model profile.
        """,
    )(function)

    return function


@click.group()
def cli_group():
    """
    Groupe de commandes pour la simulation de la surface d'attaque interne d'une trottinette électrique.
    """
    pass


@cli_group.command(name="run")
@scooter_options
@click.option(
    "--attack",
    type=click.Choice([attack.value for attack in Attack], case_sensitive=False),
    default=Attack.NONE.value,
    show_default=True,
    help="""
    Scénario d'attaque.\n
    Attack scenario.
    """,
)
@click.option(
    "--duration",
    type=int,
    required=False,
    help="""
    Durée virtuelle en millisecondes. Par défaut, la durée configurée pour l'attaque.\n
    Virtual duration in milliseconds. Defaults to the configured duration of the attack.
    """,
)
@click.option(
    "--tick-interval",
    type=int,
    required=False,
    help="""
    Période de la boucle principale du BCTRL en millisecondes.\n
    BCTRL main loop period in milliseconds.
    """,
)
@click.option(
    "--initial-soc",
    type=float,
    required=False,
    help="""
    Niveau de charge initial en pourcentage.\n
    Initial state of charge in percent.
    """,
)
@click.option(
    "--out",
    type=click.Path(path_type=Path),
    required=False,
    help="""
    Répertoire de sortie des fichiers de l'exécution.\n
    Output directory of the run files.
    """,
)
@common_options
def run_command(
    profile: str,
    countermeasures: str,
    seed: int,
    attack: str,
    duration: Optional[int],
    tick_interval: Optional[int],
    initial_soc: Optional[float],
    out: Optional[Path],
    config: Optional[Path],
    log_level: str,
    log_file: Optional[Path],
) -> None:
    """
    Exécute un scénario et écrit ses fichiers de sortie. Runs a scenario and writes its output files.

    Le succès ou l'échec de l'attaque est une donnée : le code de sortie est 0 dès que l'exécution se termine.
    """
    setup_logger(log_level, log_file)
    simulation_config = load_simulation_config(config)
    attack_value = Attack(attack.lower())

    scenario = build_scenario(
        profile=Profile(profile.lower()),
        countermeasures=countermeasures,
        attack=attack_value,
        seed=seed,
        duration=duration if duration is not None else simulation_config.durations.for_attack(attack_value),
        tick_interval=(
            tick_interval if tick_interval is not None else simulation_config.durations.tick_for_attack(attack_value)
        ),
        initial_soc=initial_soc,
    )

    run = run_scenario(scenario, simulation_config)
    click.echo(json.dumps(run.outcome.to_json(), indent=2, sort_keys=True))

    if out:
        manifest = write_outputs(lambda: export_run(run, Path(out)))
        LOGGER.info(f"Fichiers de l'exécution écrits dans '{manifest.directory}'.")


@cli_group.command(name="matrix")
@click.option(
    "--seed",
    type=click.IntRange(min=0),
    required=False,
    help="""
    Graine commune à toutes les cellules. Par défaut, celle de la configuration.\n
    Seed shared by every cell. Defaults to the configured seed.
    """,
)
@click.option(
    "--workers",
    type=click.IntRange(min=1),
    required=False,
    help="""
    Nombre de processus. 1 exécute la matrice dans le processus courant.\n
    Number of worker processes. 1 runs the matrix in the current process.
    """,
)
@click.option(
    "--out",
    type=click.Path(path_type=Path),
    required=True,
    help="""
    Répertoire de sortie de la matrice.\n
    Output directory of the matrix.
    """,
)
@common_options
def matrix_command(
    seed: Optional[int],
    workers: Optional[int],
    out: Path,
    config: Optional[Path],
    log_level: str,
    log_file: Optional[Path],
) -> None:
    """
    Exécute la matrice attaques x profils x contre-mesures. Runs the attacks x profiles x countermeasures matrix.
    """
    setup_logger(log_level, log_file)
    simulation_config = load_simulation_config(config)

    outcomes = run_matrix(simulation_config, seed=seed, workers=workers)
    outputs = write_outputs(lambda: export_matrix(outcomes, Path(out)))

    succeeded = sum(outcome.success for outcome in outcomes)
    click.echo(f"{succeeded}/{len(outcomes)} attaques réussies / successful attacks : {outputs['matrix']}")


@cli_group.command(name="image")
@scooter_options
@click.option(
    "--kind",
    type=click.Choice(IMAGE_KINDS, case_sensitive=False),
    required=True,
    help="""
    Image à produire : d'origine, de récupération, mise à jour du DRV ou image malveillante d'une attaque.\n
    Image to produce: stock, recovery, DRV update or malicious image of an attack.
    """,
)
@click.option(
    "--output",
    type=click.Path(path_type=Path),
    required=True,
    help="""
    Chemin du fichier image.\n
    Path of the image file.
    """,
)
@common_options
def image_command(
    profile: str,
    countermeasures: str,
    seed: int,
    kind: str,
    output: Path,
    config: Optional[Path],
    log_level: str,
    log_file: Optional[Path],
) -> None:
    """
    Écrit une image de micrologiciel au format BESI. Writes a firmware image in the BESI format.
    """
    setup_logger(log_level, log_file)
    simulation_config = load_simulation_config(config)
    scenario = build_scenario(profile=Profile(profile.lower()), countermeasures=countermeasures, seed=seed)
    system = ScooterSystem(scenario, simulation_config)
    kind = kind.lower()

    if kind == "stock":
        image = system.stock_bctrl_image()
    elif kind == "recovery":
        image = system.recovery_bctrl_image()
    elif kind == "drv":
        image = system.drv_update_image()
    else:
        unlock_code = system.streams.random_bytes("unlock-code", UNLOCK_CODE_SIZE)
        try:
            image = craft_attack_image(system, Attack(kind), unlock_code)
        except StockFirmwareEncryptedError as error:
            raise click.UsageError(f"{error}\nThe stock image is encrypted and cannot be patched.") from error

    path = write_outputs(lambda: write_image(image, Path(output)))
    click.echo(f"Image {image.target.name} {image.version} : {path}")


@cli_group.command(name="flash")
@click.argument("image_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@scooter_options
@common_options
def flash_command(
    image_file: Path,
    profile: str,
    countermeasures: str,
    seed: int,
    config: Optional[Path],
    log_level: str,
    log_file: Optional[Path],
) -> None:
    """
    Livre une image à travers le BTS et affiche la décision d'installation. Delivers an image through the BTS and
    prints the install decision.
    """
    setup_logger(log_level, log_file)
    simulation_config = load_simulation_config(config)
    scenario = build_scenario(profile=Profile(profile.lower()), countermeasures=countermeasures, seed=seed)

    try:
        image: FirmwareImage = read_image(Path(image_file))
    except ImageFormatError as error:
        raise click.BadParameter(str(error), param_hint="IMAGE_FILE") from error
    except OSError as error:
        LOGGER.error(f"Erreur de lecture : {error}.")
        sys.exit(EXIT_IO_ERROR)

    record = flash_image(image, scenario, simulation_config)
    result = {
        "image": {"target": image.target.name, "version": image.version},
        "profile": scenario.profile.value,
        "countermeasures": format_countermeasures(scenario.countermeasures),
        "decision": None if record is None else record.kind.value,
        "detail": None if record is None else dict(record.detail),
    }
    click.echo(json.dumps(result, indent=2, sort_keys=True))


@cli_group.command(name="calibrate")
@common_options
def calibrate_command(config: Optional[Path], log_level: str, log_file: Optional[Path]) -> None:
    """
    Ajuste les constantes du modèle de batterie aux cibles d'autonomie. Fits the battery model constants to the
    autonomy targets.
    """
    setup_logger(log_level, log_file)
    report = calibrate_battery(load_simulation_config(config))

    click.echo(
        json.dumps(
            {
                "loadMa": {str(profile): value for profile, value in report.load_ma.items()},
                "r1PerHour": round(report.r1_per_hour, 6),
                "m365LossPct": round(report.m365_loss_pct, 3),
                "es3LossPct": round(report.es3_loss_pct, 3),
            },
            indent=2,
        )
    )


@cli_group.command(name="plot")
@click.argument("voltages_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--output",
    type=click.Path(path_type=Path),
    required=True,
    help="""
    Chemin du fichier HTML.\n
    Path of the HTML file.
    """,
)
@click.option(
    "--title",
    type=str,
    required=False,
    help="""
    Titre de la figure.\n
    Figure title.
    """,
)
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default="INFO",
    show_default=True,
    help="""
    Niveau de log de la sortie standard.\n
    Log level of the standard output.
    """,
)
def plot_command(voltages_file: Path, output: Path, title: Optional[str], log_level: str) -> None:
    """
    Trace un fichier voltages.csv en HTML. Renders a voltages.csv file as HTML.
    """
    setup_logger(log_level, None)
    write_outputs(lambda: plot_voltage_file(Path(voltages_file), Path(output), title))
    click.echo(f"Figure : {output}")


if __name__ == "__main__":
    cli_group()
