"""pgm.py

Binary PGM (P5) reading and writing.

Samples are one byte when maxval < 256 and two big-endian bytes otherwise.
Header comments (``#`` to end of line) are accepted on read; writes always
use the canonical header ``P5\\n<width> <height>\\n<maxval>\\n``.
"""

from typing import Tuple, Union

import logging
from pathlib import Path

import numpy as np

from dcunet import exceptions
from dcunet.image import GrayImage

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

MAGIC = b"P5"
WHITESPACE = b" \t\n\r\v\f"


def _next_token(data: bytes, pos: int, what: str) -> Tuple[bytes, int]:
    """Skip whitespace and comments, return the next header token and its end"""
    size = len(data)
    while pos < size:
        byte = data[pos : pos + 1]
        if byte in WHITESPACE and byte:
            pos += 1
        elif byte == b"#":
            end = data.find(b"\n", pos)
            pos = size if end < 0 else end + 1
        else:
            break

    start = pos
    while pos < size and data[pos : pos + 1] not in WHITESPACE:
        pos += 1

    if start == pos:
        raise exceptions.InvalidImageError(f"Missing {what} at byte {start}")

    return data[start:pos], pos


def _parse_int(token: bytes, offset: int, what: str) -> int:
    if not token.isdigit():
        raise exceptions.InvalidImageError(
            f"Invalid {what} {token[:20]!r} at byte {offset}"
        )
    return int(token)


def decode(data: bytes) -> GrayImage:
    if data[:2] != MAGIC:
        raise exceptions.InvalidImageError(
            f"Not a binary PGM file (magic {data[:2]!r} at byte 0)"
        )

    pos = 2
    fields = []
    for what in ("width", "height", "maxval"):
        token, end = _next_token(data, pos, what)
        fields.append(_parse_int(token, end - len(token), what))
        pos = end

    width, height, maxval = fields
    if width < 1 or height < 1:
        raise exceptions.InvalidImageError(
            f"Invalid dimensions {width}x{height} in header ending at byte {pos}"
        )
    if not 0 < maxval < 65536:
        raise exceptions.InvalidImageError(
            f"maxval must be in 1..65535, got {maxval} (header ending at byte {pos})"
        )

    # exactly one whitespace byte separates header and raster
    if data[pos : pos + 1] not in WHITESPACE or pos >= len(data):
        raise exceptions.InvalidImageError(f"Missing raster separator at byte {pos}")
    pos += 1

    sample_size = 1 if maxval < 256 else 2
    expected = width * height * sample_size
    available = len(data) - pos
    if available < expected:
        raise exceptions.InvalidImageError(
            f"Truncated raster: expected {expected} bytes from byte {pos}, "
            f"file ends at byte {len(data)}"
        )

    dtype = ">u1" if sample_size == 1 else ">u2"
    pixels = np.frombuffer(data, dtype=dtype, count=width * height, offset=pos)
    pixels = pixels.reshape(height, width)

    if pixels.max() > maxval:
        flat_index = int(np.argmax(pixels > maxval))
        raise exceptions.InvalidImageError(
            f"Sample exceeds maxval {maxval} at byte {pos + flat_index * sample_size}"
        )

    depth = 8 if sample_size == 1 else 16
    return GrayImage(pixels.astype(np.uint8 if depth == 8 else np.uint16), depth)


def encode(img: GrayImage) -> bytes:
    maxval = img.max_value
    header = f"P5\n{img.width} {img.height}\n{maxval}\n".encode("ascii")
    dtype = ">u1" if img.depth == 8 else ">u2"
    return header + img.pixels.astype(dtype).tobytes()


def load_gray(path: PathLike) -> GrayImage:
    """Read a binary PGM file losslessly"""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise exceptions.DataError(f"Could not read {path}: {exc.strerror}") from exc

    try:
        return decode(data)
    except exceptions.InvalidImageError as exc:
        raise exceptions.InvalidImageError(f"{path}: {exc}") from exc


def save_gray(path: PathLike, img: GrayImage) -> None:
    path = Path(path)
    path.write_bytes(encode(img))
    logger.debug("Wrote %r to %s", img, path)
