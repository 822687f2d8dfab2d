import click

from twinbeam.harness.pipeline import RunPaths
from twinbeam.services.logs import EventLog


def run_context(ctx):
    """Experiment, run paths and event log of the current invocation."""
    experiment = ctx.obj["experiment"]
    paths = RunPaths(experiment.output_dir)
    return experiment, paths, EventLog(paths.events)


def k_values_option(func):
    return click.option("--k", "k_values", type=int, multiple=True, help="Interferer count; repeat for several. Defaults to the experiment's K list.")(func)
