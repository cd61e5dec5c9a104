"""scripts/metrics.py

Compare a predicted image to its ground truth.
"""

from typing import Optional, Sequence
from pathlib import Path
import sys

import click

from dcunet.metrics import AVAILABLE_MEASURES
from dcunet.scripts.click_types import PathlibPath


@click.command("metrics", short_help="Compute similarity measures between image pairs.")
@click.option(
    "--pred",
    "predictions",
    type=PathlibPath(dir_okay=False),
    required=True,
    multiple=True,
    help="Predicted image (binary PGM); repeat for several pairs",
)
@click.option(
    "--truth",
    "truths",
    type=PathlibPath(dir_okay=False),
    required=True,
    multiple=True,
    help="Ground truth image (binary PGM), one per --pred",
)
@click.option(
    "--measure",
    "measures",
    type=click.Choice(("all",) + AVAILABLE_MEASURES),
    default=("all",),
    multiple=True,
    show_default=True,
    help="Measures to compute; repeat for several",
)
@click.option(
    "--otsu",
    is_flag=True,
    default=False,
    help="Binarize non-binary inputs with Otsu's threshold before the Jaccard similarity",
)
@click.option(
    "-o",
    "--out",
    type=PathlibPath(dir_okay=False, writable=True),
    default=None,
    help="Write the report to this file instead of standard output",
)
def metrics(
    predictions: Sequence[Path],
    truths: Sequence[Path],
    measures: Sequence[str] = ("all",),
    otsu: bool = False,
    out: Optional[Path] = None,
) -> None:
    """Compute Jaccard, MAE, SSIM and Tanimoto similarity for each image pair.

    The Jaccard similarity needs binary masks; pass --otsu to threshold
    grayscale predictions first.

    Example:

        $ dcunet metrics --pred prediction.pgm --truth mask.pgm --measure tanimoto --otsu

    """
    from dcunet.metrics import evaluate_pairs
    from dcunet.pgm import load_gray

    if len(predictions) != len(truths):
        raise click.UsageError(
            f"Got {len(predictions)} --pred and {len(truths)} --truth images"
        )

    if "all" in measures:
        selected = AVAILABLE_MEASURES
    else:
        selected = tuple(dict.fromkeys(measures))

    pairs = [(load_gray(p), load_gray(t)) for p, t in zip(predictions, truths)]
    report = evaluate_pairs(
        pairs, names=[p.name for p in predictions], measures=selected, otsu=otsu
    )

    if out is None:
        report.write(sys.stdout)
    else:
        with open(out, "w", newline="") as f:
            report.write(f)
        click.echo(f"Wrote metric report to {out}")
