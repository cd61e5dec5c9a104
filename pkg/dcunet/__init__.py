"""__init__.py

Initialize global setup
"""

# get version
try:
    from dcunet._version import version as __version__  # noqa: F401
except ImportError:  # pragma: no cover
    # package is not installed
    raise RuntimeError(
        "dcunet has not been installed correctly. Please run `pip install -e .` "
        "in the dcunet package folder."
    ) from None

# initialize settings, define settings API
from typing import Any, Set
from dcunet.config import parse_config, DCUNetSettings

_settings: DCUNetSettings = parse_config()
_overwritten_settings: Set = set()


def update_settings(**new_config: Any) -> None:
    """Update the global dcunet runtime settings.

    Arguments:

        new_config: Options to override. Have to be valid dcunet settings.

    Example:

        >>> import dcunet
        >>> dcunet.get_settings().FLOAT_DTYPE
        'float32'
        >>> dcunet.update_settings(FLOAT_DTYPE="float64")
        >>> dcunet.get_settings().FLOAT_DTYPE
        'float64'

    """
    from dcunet.config import parse_config

    global _settings, _overwritten_settings
    current_config = {k: getattr(_settings, k) for k in _overwritten_settings}
    _settings = parse_config({**current_config, **new_config})
    _overwritten_settings |= set(new_config.keys())


def get_settings() -> DCUNetSettings:  # noqa: F821
    """Returns the current set of global runtime settings.

    Example:

        >>> import dcunet
        >>> dcunet.get_settings().BN_MOMENTUM
        0.99

    """
    return _settings


del parse_config, DCUNetSettings
del Any, Set


# expose API
from dcunet.architectures import build, get_builder  # noqa: E402,F401

__all__ = (
    "build",
    "get_builder",
    "get_settings",
    "update_settings",
)
