"""Command-line entry point: train, predict, export-embeddings."""

from __future__ import annotations

import dataclasses

import click

from fftrainer.embed import export_embeddings
from fftrainer.train import predict, train
from fftrainer.config import TrainConfig, load_config


def _config_from(config_path, overrides) -> TrainConfig:
    base = load_config(config_path) if config_path else TrainConfig()
    changed = {k: v for k, v in overrides.items() if v is not None}
    return dataclasses.replace(base, **changed)


@click.group()
def main():
    """Transformer harness for symbol coefficient datasets."""


@main.command("train")
@click.option("--config", "config_path", default=None, type=click.Path(exists=True),
              help="Flat key=value config file; flags override it.")
@click.option("--train-file", required=True, type=click.Path(exists=True))
@click.option("--test-file", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--layers", type=int, default=None)
@click.option("--d-model", type=int, default=None)
@click.option("--heads", type=int, default=None)
@click.option("--lr", type=float, default=None)
@click.option("--epochs", type=int, default=None)
@click.option("--epoch-size", type=int, default=None)
@click.option("--batch-size", type=int, default=None)
@click.option("--seed", type=int, default=None)
def train_cmd(config_path, train_file, test_file, out_dir, **overrides):
    """Train and write per-epoch predictions plus a checkpoint."""
    try:
        config = _config_from(config_path, overrides)
        metrics = train(config, train_file, test_file, out_dir)
    except (OSError, ValueError) as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}")
    click.echo("epoch\tloss\ttest_accuracy\tsign_balance\texamples")
    for m in metrics:
        click.echo(
            f"{m.epoch}\t{m.loss:.4f}\t{m.test_accuracy:.4f}"
            f"\t{m.sign_balance:.4f}\t{m.examples_seen}"
        )


@main.command("predict")
@click.option("--checkpoint", required=True, type=click.Path(exists=True))
@click.option("--dataset", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
def predict_cmd(checkpoint, dataset, out):
    """Greedy-decode a dataset file into a prediction file."""
    try:
        accuracy = predict(checkpoint, dataset, out)
    except (OSError, ValueError) as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}")
    click.echo(f"element_accuracy\t{accuracy:.6f}")


@main.command("export-embeddings")
@click.option("--checkpoint", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--pca-out", default=None, type=click.Path())
def export_cmd(checkpoint, out, pca_out):
    """Write the six letter-embedding rows (and optional 3-D PCA)."""
    try:
        export_embeddings(checkpoint, out, pca_out)
    except (OSError, ValueError) as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}")
    click.echo(out)


if __name__ == "__main__":
    main()
