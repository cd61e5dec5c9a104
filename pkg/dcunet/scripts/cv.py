"""scripts/cv.py

k-fold cross-validation from the command line.
"""

from typing import Optional, Sequence
from pathlib import Path
import sys

import click

from dcunet.datasets import load_manifest
from dcunet.scripts.click_types import PathlibPath
from dcunet.scripts.options import (
    arch_kwargs,
    architecture_options,
    build_from_options,
    training_options,
)


@click.command("cv", short_help="Cross-validate an architecture on a dataset manifest.")
@architecture_options(required=True)
@training_options
@click.option(
    "-k",
    "--k",
    "folds",
    type=click.IntRange(min=2),
    default=5,
    show_default=True,
    help="Number of folds; grouped manifests are split by group",
)
@click.option(
    "--workers",
    type=click.IntRange(min=1),
    default=None,
    help="Maximum number of parallel folds [default: MAX_WORKERS setting]",
)
@click.option(
    "-o",
    "--out",
    type=PathlibPath(dir_okay=False, writable=True),
    default=None,
    help="Write the report to this file instead of standard output",
)
def cv(
    arch: str,
    manifest: Path,
    base_filters: Optional[Sequence[int]] = None,
    alpha: Optional[float] = None,
    bn_scale: bool = False,
    epochs: Optional[int] = None,
    learning_rate: Optional[float] = None,
    batch_size: Optional[int] = None,
    seed: Optional[int] = None,
    normalize_loss: bool = False,
    folds: int = 5,
    workers: Optional[int] = None,
    out: Optional[Path] = None,
) -> None:
    """Train once per fold on the remaining folds and score the held-out fold.

    The report has one row per fold (fold index, held-out items, mean
    Tanimoto similarity) followed by the mean and standard deviation of the
    fold scores and the mean over all held-out images.

    Example:

        $ dcunet cv --arch dcunet --manifest data/manifest.json -k 5 --epochs 50

    """
    from dcunet.training import cross_validate, make_train_config

    build_from_options(arch, base_filters, alpha, bn_scale)
    config = make_train_config(
        epochs=epochs,
        learning_rate=learning_rate,
        batch_size=batch_size,
        seed=seed,
        normalize_loss=normalize_loss,
        folds=folds,
    )
    dataset = load_manifest(manifest)

    report = cross_validate(
        arch,
        dataset,
        config,
        arch_kwargs=arch_kwargs(arch, base_filters, alpha, bn_scale),
        max_workers=workers,
    )

    if out is None:
        report.write(sys.stdout)
    else:
        with open(out, "w", newline="") as f:
            report.write(f)
        click.echo(f"Wrote cross-validation report to {out}")
