"""architectures/__init__.py

Define an interface to retrieve architecture builders.
"""

from typing import Any, Callable, Tuple

from dcunet import exceptions
from dcunet.architectures.spec import GraphSpec

Builder = Callable[..., GraphSpec]

AVAILABLE_ARCHITECTURES: Tuple[str, ...] = ("unet", "multires", "dcunet")


def get_builder(name: str) -> Builder:
    """Retrieve the graph builder of an architecture.

    Arguments:

        name: One of ``unet``, ``multires``, ``dcunet``.

    Example:

        >>> import dcunet
        >>> spec = dcunet.get_builder("dcunet")(base_U=(8, 16, 32, 64, 128))
        >>> spec.block("block1").filters
        (2, 4, 6)

    """
    if name == "unet":
        from dcunet.architectures.unet import build_unet

        return build_unet

    if name == "multires":
        from dcunet.architectures.multiresunet import build_multiresunet

        return build_multiresunet

    if name == "dcunet":
        from dcunet.architectures.dcunet import build_dcunet

        return build_dcunet

    raise exceptions.InvalidArgumentsError(
        f"Unknown architecture {name!r} (available: {', '.join(AVAILABLE_ARCHITECTURES)})"
    )


def build(name: str, **kwargs: Any) -> GraphSpec:
    """Build the GraphSpec of an architecture by name"""
    return get_builder(name)(**kwargs)
