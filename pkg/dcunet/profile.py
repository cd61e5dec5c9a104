"""profile.py

Context managers for performance tracing.
"""

from typing import Iterator

import contextlib
import logging
import time

from dcunet import get_settings

logger = logging.getLogger(__name__)


@contextlib.contextmanager
def trace(description: str) -> Iterator[None]:
    settings = get_settings()
    if not settings.PROFILE:
        yield
        return

    start = time.perf_counter()
    try:
        yield
    finally:
        elapsed = time.perf_counter() - start
        logger.debug("%s took %.3fs", description, elapsed)
