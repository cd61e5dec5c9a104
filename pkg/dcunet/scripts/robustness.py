"""scripts/robustness.py

Size and ratio sensitivity of the similarity measures.
"""

from typing import Optional, Sequence, TextIO
from pathlib import Path
import sys

import click

from dcunet import reports
from dcunet.metrics import AVAILABLE_MEASURES
from dcunet.robustness import DEFAULT_RATIOS, DEFAULT_SIZES, RobustnessTable
from dcunet.scripts.click_types import NumberList, PathlibPath

SERIES_HEADER = ("measure", "axis", "x", "mean")


def _write_series(stream: TextIO, table: RobustnessTable) -> None:
    rows = [
        (measure, axis, x, value)
        for measure in table.measures
        for axis in ("size", "ratio")
        for x, value in table.series(measure, axis)
    ]
    reports.write_table(stream, SERIES_HEADER, rows)


@click.command("robustness", short_help="Measure sensitivity to image size and area ratio.")
@click.option(
    "--pairs",
    type=PathlibPath(dir_okay=False),
    required=True,
    help="Manifest whose items hold predictions (image) and ground truths (mask)",
)
@click.option(
    "--sizes",
    type=NumberList(int, min_value=1),
    default=",".join(str(s) for s in DEFAULT_SIZES),
    show_default=True,
    help="Comma-separated integer down-sampling factors",
)
@click.option(
    "--ratios",
    type=NumberList(float, min_value=1),
    default=",".join(str(r) for r in DEFAULT_RATIOS),
    show_default=True,
    help="Comma-separated side length multipliers realized as blank margins",
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
    "--series",
    is_flag=True,
    default=False,
    help="Emit plot-ready mean series along each axis instead of the full table",
)
@click.option(
    "-o",
    "--out",
    type=PathlibPath(dir_okay=False, writable=True),
    default=None,
    help="Write the table to this file instead of standard output",
)
def robustness(
    pairs: Path,
    sizes: Sequence[int] = DEFAULT_SIZES,
    ratios: Sequence[float] = DEFAULT_RATIOS,
    measures: Sequence[str] = ("all",),
    series: bool = False,
    out: Optional[Path] = None,
) -> None:
    """Evaluate every measure on down-sampled and padded versions of each pair.

    Jaccard similarity is computed after Otsu binarization of the
    prediction. The command fails if the Tanimoto similarity of any pair
    changes along the ratio axis.

    Example:

        $ dcunet robustness --pairs pairs.json --sizes 1,2,4 --ratios 1,1.5,2

    """
    from dcunet.datasets import load_manifest
    from dcunet.pgm import load_gray
    from dcunet.robustness import robustness_experiment

    if "all" in measures:
        selected = AVAILABLE_MEASURES
    else:
        selected = tuple(dict.fromkeys(measures))

    manifest = load_manifest(pairs, check_resolution=False)
    images = [(load_gray(item.image), load_gray(item.mask)) for item in manifest.items]
    names = [item.image.name for item in manifest.items]

    table = robustness_experiment(images, sizes, ratios, selected, names)

    def write(stream: TextIO) -> None:
        if series:
            _write_series(stream, table)
        else:
            table.write(stream)

    if out is None:
        write(sys.stdout)
    else:
        with open(out, "w", newline="") as f:
            write(f)
        click.echo(f"Wrote robustness table to {out}")
