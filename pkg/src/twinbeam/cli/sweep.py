import click

from twinbeam.cli.common import k_values_option, run_context
from twinbeam.cli.utils import SEEDS, cli_errors, flatten
from twinbeam.errors import SweepFailedError


@click.command()
@click.option("--scheme", "schemes", multiple=True, help="Scheme id; repeat for several.")
@k_values_option
@click.option("--seed", "seeds", type=SEEDS, multiple=True, help="Evaluation seeds.")
@click.option("--workers", type=int, help="Worker processes.")
@click.pass_context
@cli_errors
def sweep(ctx, schemes, k_values, seeds, workers):
    """Dataset, training, simulation and evaluation for every K."""
    from twinbeam.harness.evaluation import evaluate_traces
    from twinbeam.harness.models import JobStatus
    from twinbeam.harness.pipeline import default_schemes, make_dataset, record_config, train_model
    from twinbeam.harness.registry import needs_model
    from twinbeam.harness.runner import run_cells

    experiment, paths, event_log = run_context(ctx)
    schemes = default_schemes(experiment, schemes)
    k_values = list(k_values) or experiment.k_values
    seeds = flatten(seeds) or experiment.seeds
    record_config(experiment, paths)

    if needs_model(schemes):
        for k in k_values:
            click.echo(f"K={k}: building dataset")
            make_dataset(experiment, k, experiment.train_seeds, paths.dataset(k))
            click.echo(f"K={k}: training")
            train_model(experiment, paths.dataset(k), paths.model(k), event_log=event_log)

    summary = run_cells(
        experiment,
        schemes,
        k_values,
        seeds,
        paths,
        model_paths={k: paths.model(k) for k in k_values},
        workers=workers or experiment.workers or 1,
        event_log=event_log,
    )
    failed = summary.count(JobStatus.FAILED)
    click.echo(f"Cells: {summary.count(JobStatus.COMPLETED)} completed, {failed} failed")
    if failed:
        raise SweepFailedError(f"{failed} of {len(summary.jobs)} cells failed; see {paths.events}")

    outputs = evaluate_traces(
        paths.traces,
        paths.root,
        experiment.bandwidth_hz,
        expected_hash=experiment.config_hash(),
        include_oracle=experiment.include_oracle_in_figures,
    )
    for name, path in outputs.items():
        click.echo(f"{name:22} {path}")
