"""scripts/eval.py

Score a trained checkpoint on a dataset manifest.
"""

from typing import Optional, Sequence
from pathlib import Path
import sys

import click
import numpy as np

from dcunet import reports
from dcunet.datasets import load_manifest
from dcunet.scripts.click_types import NumberList, PathlibPath
from dcunet.scripts.options import architecture_options, build_from_options

EVAL_HEADER = ("index", "image", "tanimoto")


@click.command("eval", short_help="Score a checkpoint with per-image Tanimoto similarity.")
@architecture_options(required=True)
@click.option(
    "--checkpoint",
    type=PathlibPath(dir_okay=False),
    required=True,
    help="Checkpoint written by the train command",
)
@click.option(
    "--manifest",
    type=PathlibPath(dir_okay=False),
    required=True,
    help="JSON dataset manifest",
)
@click.option(
    "--indices",
    type=NumberList(int, min_value=0),
    default=None,
    help="Comma-separated manifest indices to score [default: all]",
)
@click.option(
    "--batch",
    "batch_size",
    type=click.IntRange(min=1),
    default=None,
    help="Images per forward pass [default: BATCH_SIZE setting]",
)
@click.option(
    "-o",
    "--out",
    type=PathlibPath(dir_okay=False, writable=True),
    default=None,
    help="Write the report to this file instead of standard output",
)
def eval_(
    arch: str,
    checkpoint: Path,
    manifest: Path,
    base_filters: Optional[Sequence[int]] = None,
    alpha: Optional[float] = None,
    bn_scale: bool = False,
    indices: Optional[Sequence[int]] = None,
    batch_size: Optional[int] = None,
    out: Optional[Path] = None,
) -> None:
    """Predict masks in inference mode and compare them to the ground truth.

    Example:

        $ dcunet eval --arch dcunet --checkpoint run/model.ckpt --manifest data/manifest.json

    """
    from dcunet import get_settings
    from dcunet.architectures.model import Model
    from dcunet.training import evaluate

    spec = build_from_options(arch, base_filters, alpha, bn_scale)
    dataset = load_manifest(manifest)

    if indices is None:
        indices = tuple(range(len(dataset.items)))

    for index in indices:
        if index >= len(dataset.items):
            raise click.BadParameter(
                f"index {index} out of range for {len(dataset.items)} items",
                param_hint="--indices",
            )

    model = Model(spec)
    model.load(checkpoint)

    scores = evaluate(model, dataset, indices, batch_size or get_settings().BATCH_SIZE)
    rows = [
        (index, dataset.items[index].image.name, score) for index, score in zip(indices, scores)
    ]
    footer = [("mean", "", float(np.mean(scores))), ("std", "", float(np.std(scores)))]

    if out is None:
        reports.write_table(sys.stdout, EVAL_HEADER, rows, footer)
    else:
        with open(out, "w", newline="") as f:
            reports.write_table(f, EVAL_HEADER, rows, footer)
        click.echo(f"Wrote evaluation report to {out}")
