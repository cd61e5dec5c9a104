"""scripts/synth.py

Generate a synthetic blob segmentation dataset.
"""

from typing import Optional
from pathlib import Path
import sys

import click
import click_spinner

from dcunet.scripts.click_types import PathlibPath


@click.command("synth", short_help="Write a synthetic blob dataset with manifest.")
@click.option("--count", type=click.IntRange(min=1), default=40, show_default=True, help="Number of samples")
@click.option("--width", type=click.IntRange(min=16), default=64, show_default=True, help="Image width (multiple of 16)")
@click.option("--height", type=click.IntRange(min=16), default=64, show_default=True, help="Image height (multiple of 16)")
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Seed [default: DEFAULT_SEED setting]")
@click.option(
    "--groups",
    type=click.IntRange(min=1),
    default=None,
    help="Assign items round-robin to this many group labels",
)
@click.option("--depth", type=click.Choice(["8", "16"]), default="8", show_default=True, help="Image bit depth")
@click.option(
    "-o",
    "--out",
    type=PathlibPath(file_okay=False),
    required=True,
    help="Output folder for images, masks and manifest.json",
)
@click.option("-q", "--quiet", is_flag=True, default=False, help="Suppress all output to stdout")
def synth(
    out: Path,
    count: int = 40,
    width: int = 64,
    height: int = 64,
    seed: Optional[int] = None,
    groups: Optional[int] = None,
    depth: str = "8",
    quiet: bool = False,
) -> None:
    """Generate images with one to three soft-edged ellipses over noise, plus exact masks.

    Output is deterministic for a given seed.

    Example:

        $ dcunet synth --count 40 --width 64 --height 64 --seed 0 -o data

    """
    from dcunet import get_settings
    from dcunet.datasets import MANIFEST_NAME, synth_blobs

    for label, value in (("--width", width), ("--height", height)):
        if value % 16:
            raise click.BadParameter(f"must be a multiple of 16, got {value}", param_hint=label)

    if groups is not None and groups > count:
        raise click.BadParameter(
            f"cannot exceed --count ({count}), got {groups}", param_hint="--groups"
        )

    if seed is None:
        seed = get_settings().DEFAULT_SEED

    with click_spinner.spinner(beep=False, disable=quiet, force=False, stream=sys.stdout):
        synth_blobs(count, width, height, seed, out, groups=groups, depth=int(depth))

    if not quiet:
        click.echo(f"Wrote {count} samples and {out / MANIFEST_NAME}")
