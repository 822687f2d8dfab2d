import click

from twinbeam.cli.common import run_context
from twinbeam.cli.utils import cli_errors


@click.command()
@click.option("--traces", "trace_dir", help="Trace directory. Defaults to <output>/traces.")
@click.option("--include-oracle", is_flag=True, default=None, help="Keep the oracle in figure CSVs.")
@click.option("--check-hash/--no-check-hash", default=False, help="Require traces from the current config.")
@click.pass_context
@cli_errors
def evaluate(ctx, trace_dir, include_oracle, check_hash):
    """Reduce traces to metric reports and figure CSVs."""
    from twinbeam.harness.evaluation import evaluate_traces

    experiment, paths, _ = run_context(ctx)
    outputs = evaluate_traces(
        trace_dir or paths.traces,
        paths.root,
        experiment.bandwidth_hz,
        expected_hash=experiment.config_hash() if check_hash else None,
        include_oracle=experiment.include_oracle_in_figures if include_oracle is None else include_oracle,
    )
    for name, path in outputs.items():
        click.echo(f"{name:22} {path}")
