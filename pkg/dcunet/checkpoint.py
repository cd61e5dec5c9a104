"""checkpoint.py

Flat binary container for named parameter arrays.

Layout (all integers little-endian)::

    b"DCUN" | version (uint8) | record count (uint32)
    per record: name length (uint16) | utf-8 name | ndim (uint8)
                | dims (uint32 each) | float32 payload

"""

from typing import BinaryIO, Dict, Mapping, Union

import io
import struct
import logging
from pathlib import Path

import numpy as np

from dcunet import exceptions

logger = logging.getLogger(__name__)

MAGIC = b"DCUN"
VERSION = 1

PathLike = Union[str, Path]


def _read_exact(stream: BinaryIO, size: int, what: str) -> bytes:
    offset = stream.tell()
    chunk = stream.read(size)
    if len(chunk) != size:
        raise exceptions.InvalidCheckpointError(
            f"Truncated checkpoint while reading {what} at byte {offset}"
        )
    return chunk


def dumps(arrays: Mapping[str, np.ndarray]) -> bytes:
    """Serialize named arrays; names are written in the given order"""
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack("<BI", VERSION, len(arrays)))

    for name, arr in arrays.items():
        encoded = name.encode("utf-8")
        if len(encoded) > 0xFFFF:
            raise ValueError(f"Parameter name too long: {name[:40]}...")

        arr = np.asarray(arr)
        buf.write(struct.pack("<H", len(encoded)))
        buf.write(encoded)
        buf.write(struct.pack(f"<B{arr.ndim}I", arr.ndim, *arr.shape))
        buf.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())

    return buf.getvalue()


def loads(payload: bytes) -> Dict[str, np.ndarray]:
    stream = io.BytesIO(payload)

    magic = _read_exact(stream, 4, "magic")
    if magic != MAGIC:
        raise exceptions.InvalidCheckpointError(
            f"Not a dcunet checkpoint (magic {magic!r} at byte 0)"
        )

    version, count = struct.unpack("<BI", _read_exact(stream, 5, "header"))
    if version != VERSION:
        raise exceptions.InvalidCheckpointError(
            f"Unsupported checkpoint version {version} at byte 4"
        )

    out: Dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = struct.unpack("<H", _read_exact(stream, 2, "name length"))
        name = _read_exact(stream, name_len, "name").decode("utf-8")
        (ndim,) = struct.unpack("<B", _read_exact(stream, 1, f"rank of {name}"))
        shape = struct.unpack(f"<{ndim}I", _read_exact(stream, 4 * ndim, f"shape of {name}"))
        size = int(np.prod(shape, dtype=np.int64))
        data = _read_exact(stream, 4 * size, f"payload of {name}")

        if name in out:
            raise exceptions.InvalidCheckpointError(f"Duplicate record {name}")

        out[name] = np.frombuffer(data, dtype="<f4").reshape(shape).astype("float32")

    trailing = stream.read()
    if trailing:
        raise exceptions.InvalidCheckpointError(
            f"{len(trailing)} unexpected trailing bytes after {count} records"
        )

    return out


def save(path: PathLike, arrays: Mapping[str, np.ndarray]) -> None:
    path = Path(path)
    path.write_bytes(dumps(arrays))
    logger.info("Wrote %d parameter arrays to %s", len(arrays), path)


def load(path: PathLike) -> Dict[str, np.ndarray]:
    path = Path(path)
    try:
        payload = path.read_bytes()
    except OSError as exc:
        raise exceptions.InvalidCheckpointError(f"Could not read checkpoint {path}") from exc
    return loads(payload)
