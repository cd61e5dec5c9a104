"""scripts/options.py

Options shared by several subcommands.
"""

from typing import Any, Callable, Dict, Optional, Sequence, TypeVar

import click

from dcunet.architectures import AVAILABLE_ARCHITECTURES, build
from dcunet.architectures.spec import CountConvention, GraphSpec
from dcunet.scripts.click_types import NumberList, PathlibPath

F = TypeVar("F", bound=Callable[..., Any])


def architecture_options(required: bool = True) -> Callable[[F], F]:
    """Adds --arch, --base-filters, --alpha and --bn-scale"""

    def decorator(func: F) -> F:
        func = click.option(
            "--bn-scale",
            is_flag=True,
            default=False,
            help="Learn a scale in the batch normalization after every convolution",
        )(func)
        func = click.option(
            "--alpha",
            type=click.FloatRange(min=0, min_open=True),
            default=None,
            help="Filter multiplier of MultiRes and DC blocks [default: 1.67]",
        )(func)
        func = click.option(
            "--base-filters",
            type=NumberList(int, min_value=1),
            default=None,
            help="Comma-separated base widths of the five encoder stages "
            "[default: published widths]",
        )(func)
        func = click.option(
            "--arch",
            type=click.Choice(AVAILABLE_ARCHITECTURES),
            required=required,
            default=None if required else "dcunet",
            show_default=not required,
            help="Network architecture",
        )(func)
        return func

    return decorator


def arch_kwargs(
    arch: str,
    base_filters: Optional[Sequence[int]],
    alpha: Optional[float],
    bn_scale: bool = False,
) -> Dict[str, Any]:
    """Builder keyword arguments for the architecture options"""
    kwargs: Dict[str, Any] = {}
    if bn_scale:
        kwargs["convention"] = CountConvention(bn_scale=True)

    if arch == "unet":
        if alpha is not None:
            raise click.UsageError("--alpha does not apply to unet")
        if base_filters is not None:
            kwargs["base_filters"] = tuple(base_filters)
        return kwargs

    if base_filters is not None:
        kwargs["base_U"] = tuple(base_filters)
    if alpha is not None:
        kwargs["alpha"] = alpha
    return kwargs


def build_from_options(
    arch: str,
    base_filters: Optional[Sequence[int]],
    alpha: Optional[float],
    bn_scale: bool = False,
) -> GraphSpec:
    kwargs = arch_kwargs(arch, base_filters, alpha, bn_scale)
    try:
        return build(arch, **kwargs)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc


def training_options(func: F) -> F:
    """Adds the dataset, optimizer and schedule options shared by train and cv"""
    func = click.option(
        "--seed",
        type=click.IntRange(min=0),
        default=None,
        help="Master seed [default: DEFAULT_SEED setting]",
    )(func)
    func = click.option(
        "--batch",
        "batch_size",
        type=click.IntRange(min=1),
        default=None,
        help="Images per batch [default: BATCH_SIZE setting]",
    )(func)
    func = click.option(
        "--lr",
        "learning_rate",
        type=click.FloatRange(min=0),
        default=None,
        help="Adam learning rate [default: LEARNING_RATE setting]",
    )(func)
    func = click.option(
        "--epochs",
        type=click.IntRange(min=1),
        default=None,
        help="Number of epochs [default: EPOCHS setting]",
    )(func)
    func = click.option(
        "--normalize-loss",
        is_flag=True,
        default=False,
        help="Divide the per-image loss by the number of pixels",
    )(func)
    func = click.option(
        "--manifest",
        type=PathlibPath(dir_okay=False),
        required=True,
        help="JSON dataset manifest",
    )(func)
    return func
