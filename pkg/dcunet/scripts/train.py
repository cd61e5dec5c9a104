"""scripts/train.py

Train a model on a dataset manifest.
"""

from typing import Optional, Sequence
from pathlib import Path
import logging

import click

from dcunet.datasets import load_manifest
from dcunet.scripts.click_types import PathlibPath
from dcunet.scripts.options import architecture_options, build_from_options, training_options

logger = logging.getLogger(__name__)

CHECKPOINT_NAME = "model.ckpt"
LOG_NAME = "train_log.csv"


@click.command("train", short_help="Train a model on a dataset manifest.")
@architecture_options(required=True)
@training_options
@click.option(
    "--val-fraction",
    type=click.FloatRange(min=0, max=1, max_open=True),
    default=0.2,
    show_default=True,
    help="Share of items held out for per-epoch validation",
)
@click.option(
    "-o",
    "--out",
    type=PathlibPath(file_okay=False),
    required=True,
    help=f"Output folder for {CHECKPOINT_NAME} and {LOG_NAME}",
)
@click.option("-q", "--quiet", is_flag=True, default=False, help="Hide the progress bar")
def train(
    arch: str,
    manifest: Path,
    out: Path,
    base_filters: Optional[Sequence[int]] = None,
    alpha: Optional[float] = None,
    bn_scale: bool = False,
    epochs: Optional[int] = None,
    learning_rate: Optional[float] = None,
    batch_size: Optional[int] = None,
    seed: Optional[int] = None,
    normalize_loss: bool = False,
    val_fraction: float = 0.2,
    quiet: bool = False,
) -> None:
    """Train a freshly initialized model and write its checkpoint and loss log.

    The log has one line per epoch with the mean batch loss and the mean
    Tanimoto similarity on the held-out items.

    Example:

        $ dcunet --deterministic train --arch dcunet --manifest data/manifest.json -o run

    """
    from dcunet.training import make_train_config
    from dcunet.training import train as train_model

    spec = build_from_options(arch, base_filters, alpha, bn_scale)
    config = make_train_config(
        epochs=epochs,
        learning_rate=learning_rate,
        batch_size=batch_size,
        seed=seed,
        normalize_loss=normalize_loss,
        val_fraction=val_fraction,
    )
    dataset = load_manifest(manifest)

    out.mkdir(parents=True, exist_ok=True)
    result = train_model(
        spec,
        dataset,
        config,
        checkpoint_path=out / CHECKPOINT_NAME,
        progress=not quiet,
    )

    with open(out / LOG_NAME, "w", newline="") as f:
        result.log.write(f)

    last = result.log[-1]
    click.echo(
        f"Trained {spec.name} for {result.steps} steps: "
        f"loss {result.initial_loss:.6f} -> {last.loss:.6f}"
    )
    click.echo(f"Wrote {out / CHECKPOINT_NAME} and {out / LOG_NAME}")
