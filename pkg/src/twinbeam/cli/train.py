import click

from twinbeam.cli.common import run_context
from twinbeam.cli.utils import cli_errors


@click.command()
@click.option("--k", "k", type=int, required=True, help="Interferer count of the dataset.")
@click.option("--dataset", "dataset_dir", help="Dataset directory. Defaults to <output>/datasets/K<k>.")
@click.option("--model", "model_path", help="Artifact to write. Defaults to <output>/models/model_K<k>.pt.")
@click.option("--resume", "resume_path", help="Artifact to continue training from.")
@click.option("--epochs", type=int, help="Epochs to run, overriding the experiment.")
@click.pass_context
@cli_errors
def train(ctx, k, dataset_dir, model_path, resume_path, epochs):
    """Train the generative predictor on a saved dataset."""
    from twinbeam.harness.pipeline import train_model, training_log_path

    experiment, paths, event_log = run_context(ctx)
    if epochs is not None:
        experiment = experiment.model_copy(update={"training": dict(experiment.training.model_dump(), epochs=epochs)})
    model_path = model_path or paths.model(k)
    model = train_model(
        experiment,
        dataset_dir or paths.dataset(k),
        model_path,
        resume_path=resume_path,
        event_log=event_log,
    )
    last = model.log.last()
    click.echo(f"Trained {model.log.epochs} epochs: loss_pred={last['loss_pred']:.6g} val_loss_pred={last['val_loss_pred']:.6g}")
    click.echo(f"Model: {model_path}")
    click.echo(f"Loss curve: {training_log_path(model_path)}")
