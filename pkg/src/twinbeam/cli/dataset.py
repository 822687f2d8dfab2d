import json

import click

from twinbeam.cli.common import k_values_option, run_context
from twinbeam.cli.utils import SEEDS, cli_errors, flatten


@click.command()
@k_values_option
@click.option("--seed", "seeds", type=SEEDS, multiple=True, help="Scenario seeds. Defaults to the experiment's train_seeds.")
@click.pass_context
@cli_errors
def dataset(ctx, k_values, seeds):
    """Build the DT dataset for each K."""
    from twinbeam.harness.pipeline import make_dataset, record_config

    experiment, paths, _ = run_context(ctx)
    seeds = flatten(seeds) or experiment.train_seeds
    record_config(experiment, paths)
    for k in list(k_values) or experiment.k_values:
        manifest = make_dataset(experiment, k, seeds, paths.dataset(k))
        click.echo(json.dumps({"directory": paths.dataset(k), **manifest}, sort_keys=True))
