"""scripts/summarize.py

Print a layer-by-layer summary or the text export of an architecture.
"""

from typing import Optional, Sequence, Tuple

import click

from dcunet import get_settings
from dcunet.architectures.counting import summarize as summarize_spec
from dcunet.architectures.spec import check_input_shape
from dcunet.scripts.click_types import Resolution
from dcunet.scripts.options import architecture_options, build_from_options


@click.command("summarize", short_help="Print the layer table of an architecture.")
@architecture_options(required=True)
@click.option(
    "--input-size",
    type=Resolution(),
    default=None,
    help="Input resolution as HEIGHTxWIDTH [default: INPUT_SIZE setting]",
)
@click.option(
    "--export",
    is_flag=True,
    default=False,
    help="Print the deterministic text serialization instead of the table",
)
def summarize(
    arch: str,
    base_filters: Optional[Sequence[int]] = None,
    alpha: Optional[float] = None,
    bn_scale: bool = False,
    input_size: Optional[Tuple[int, int]] = None,
    export: bool = False,
) -> None:
    """Print every layer with its kernel, width, parameter count and output shape.

    Example:

        $ dcunet summarize --arch unet --input-size 256x128

    """
    spec = build_from_options(arch, base_filters, alpha, bn_scale)

    if export:
        click.echo(spec.export(), nl=False)
        return

    height, width = input_size or get_settings().INPUT_SIZE
    input_shape = (1, spec.in_channels, height, width)
    try:
        check_input_shape(spec, input_shape)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--input-size") from exc

    click.echo(summarize_spec(spec, input_shape))
