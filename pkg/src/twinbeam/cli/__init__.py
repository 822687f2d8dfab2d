import logging

import click

from twinbeam.cli.dataset import dataset
from twinbeam.cli.evaluate import evaluate
from twinbeam.cli.simulate import simulate
from twinbeam.cli.sweep import sweep
from twinbeam.cli.train import train
from twinbeam.cli.utils import cli_errors, resolve_config_path
from twinbeam.config import config as settings


@click.group()
@click.option("--config", "config_path", help="Experiment config (YAML). Defaults to ./twinbeam.yaml or ~/.config/twinbeam/config.yaml.")
@click.option("--scene", "scene_file", help="Scene file overriding the experiment's.")
@click.option("--output", "output_dir", help="Run directory. Defaults to the experiment's output_dir.")
@click.option("--quick", is_flag=True, help="Single short seed for smoke runs.")
@click.option("-v", "--verbose", is_flag=True, help="Debug logging.")
@click.pass_context
@cli_errors
def main(ctx, config_path, scene_file, output_dir, quick, verbose):
    """Proactive interference management simulator for indoor XL-MIMO."""
    from twinbeam.config.experiment import load_experiment

    logging.basicConfig(
        level=logging.DEBUG if verbose else getattr(logging, settings.log_level, logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    experiment = load_experiment(resolve_config_path(config_path))
    updates = {}
    if scene_file:
        updates["scene_file"] = scene_file
    elif experiment.scene_file is None and settings.scene_file:
        updates["scene_file"] = settings.scene_file
    if output_dir or experiment.output_dir is None:
        updates["output_dir"] = output_dir or settings.output_directory
    if experiment.workers is None:
        updates["workers"] = settings.workers
    if updates:
        experiment = experiment.model_copy(update=updates)
    if quick:
        experiment = experiment.quick(settings.quick_seeds, settings.quick_steps)

    ctx.ensure_object(dict)
    ctx.obj["experiment"] = experiment


main.add_command(simulate)
main.add_command(dataset)
main.add_command(train)
main.add_command(evaluate)
main.add_command(sweep)
