import click

from twinbeam.cli.common import k_values_option, run_context
from twinbeam.cli.utils import SEEDS, cli_errors, flatten
from twinbeam.errors import SweepFailedError


@click.command()
@click.option("--scheme", "schemes", multiple=True, help="Scheme id; repeat for several. Defaults to the experiment's list.")
@k_values_option
@click.option("--seed", "seeds", type=SEEDS, multiple=True, help="Seeds, e.g. 0,1,2 or 0-19.")
@click.option("--model", "model_path", help="Model artifact used for every K. Not combinable with --models-dir.")
@click.option("--models-dir", "models_dir", help="Directory holding model_K<k>.pt artifacts.")
@click.option("--workers", type=int, help="Worker processes.")
@click.pass_context
@cli_errors
def simulate(ctx, schemes, k_values, seeds, model_path, models_dir, workers):
    """Run the closed loop and write one trace per (scheme, K, seed)."""
    import os

    from twinbeam.harness.pipeline import default_schemes, model_paths_for, record_config
    from twinbeam.harness.registry import get_scheme, needs_model
    from twinbeam.harness.runner import run_cells
    from twinbeam.harness.models import JobStatus

    if model_path and models_dir:
        raise click.UsageError("--model and --models-dir are mutually exclusive")

    experiment, paths, event_log = run_context(ctx)
    schemes = default_schemes(experiment, schemes)
    for scheme in schemes:
        get_scheme(scheme)
    k_values = list(k_values) or experiment.k_values
    seeds = flatten(seeds) or experiment.seeds

    models = model_paths_for(paths, k_values, model_path)
    if models_dir:
        models = {k: os.path.join(models_dir, f"model_K{k}.pt") for k in k_values}
    if needs_model(schemes):
        for k, path in models.items():
            if not os.path.exists(path):
                raise FileNotFoundError(f"Model artifact for K={k} not found: {path}")

    record_config(experiment, paths)
    summary = run_cells(
        experiment,
        schemes,
        k_values,
        seeds,
        paths,
        model_paths=models,
        workers=workers or experiment.workers or 1,
        event_log=event_log,
    )
    for job in summary.jobs:
        click.echo(f"{job.status.value:10} {job.trace_path}" + (f"  {job.error}" if job.error else ""))
    failed = summary.count(JobStatus.FAILED)
    if failed:
        raise SweepFailedError(f"{failed} of {len(summary.jobs)} cells failed; see {paths.events}")
